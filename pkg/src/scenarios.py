"""
🗺️ Scenarios - simulation setups, user placement, scenario files

Scenario file: one `key=value` per line, `#` starts a comment, vectors are
comma-separated, `irs_positions` is a flat list of x,y,z triples.
"""

import math
from pathlib import Path
from typing import Any, Callable

import numpy as np
from pydantic import ValidationError

from .channel import angles_from_geometry, steering_correlation
from .errors import ConfigParseError, InvalidArgumentError
from .models import (
    SETUP_SPAN,
    NodeLayout,
    ScenarioConfig,
    check_user_distance,
)

# Setup 1 geometry (meters): BS midway between two IRS pairs
SETUP1_IRS = [(0.0, -5.0, 0.3), (0.0, 5.0, 0.3), (60.0, -3.0, 0.3),
              (60.0, 3.0, 0.3)]
SETUP1_IRS_NORMALS = [0.0, 0.0, math.pi, math.pi]  # 보드사이드가 BS 쪽을 향함
# BS steering vectors are treated as near-orthogonal below this correlation
NEAR_ORTHOGONAL_LIMIT = 0.2


def build_setup1(d: float = 5.0, **overrides: Any) -> ScenarioConfig:
    """4 IRSs, 4 users at x in {d, 60 - d}, |y| ~ U(0, 10), z = 0"""
    check_user_distance(d)
    fields = dict(
        name="setup1",
        setup=1,
        irs_positions=SETUP1_IRS,
        irs_normals=SETUP1_IRS_NORMALS,
        user_anchor_x=[0.0, 0.0, SETUP_SPAN, SETUP_SPAN],
        user_direction=[1.0, 1.0, -1.0, -1.0],
        user_y_sign=[-1.0, 1.0, -1.0, 1.0],
        user_z=[0.0, 0.0, 0.0, 0.0],
        user_distance=d,
    )
    return ScenarioConfig(**{**fields, **overrides})


def build_setup2(d: float = 5.0, **overrides: Any) -> ScenarioConfig:
    """Setup 1 restricted to IRS-1, IRS-2, U1, U2 (L = K = 2)"""
    check_user_distance(d)
    fields = dict(
        name="setup2",
        setup=2,
        irs_positions=SETUP1_IRS[:2],
        irs_normals=SETUP1_IRS_NORMALS[:2],
        user_anchor_x=[0.0, 0.0],
        user_direction=[1.0, 1.0],
        user_y_sign=[-1.0, 1.0],
        user_z=[0.0, 0.0],
        user_distance=d,
    )
    return ScenarioConfig(**{**fields, **overrides})


SETUP_BUILDERS: dict[int, Callable[..., ScenarioConfig]] = {
    1: build_setup1,
    2: build_setup2,
}


def build_setup(setup: int, d: float = 5.0, **overrides: Any) -> ScenarioConfig:
    if setup not in SETUP_BUILDERS:
        raise InvalidArgumentError(f"unknown setup {setup} (expected 1 or 2)")
    return SETUP_BUILDERS[setup](d, **overrides)


def bs_steering_correlation(config: ScenarioConfig) -> float:
    """Largest |a_t^H a_t| between the BS -> IRS departure directions"""
    psis = [
        angles_from_geometry(config.bs_position, irs, config.bs_normal).azimuth
        for irs in config.irs_positions
    ]
    return steering_correlation(psis, config.bs_antennas,
                                config.spacing_ratio)


def place_users(config: ScenarioConfig, rng: np.random.Generator) -> NodeLayout:
    """Realize user coordinates for one trial (one |y| draw per user)"""
    offsets = rng.uniform(0.0, config.user_offset_max, config.num_users)
    users = [(anchor + direction * config.user_distance, sign * offset, z)
             for anchor, direction, sign, z, offset in zip(
                 config.user_anchor_x, config.user_direction,
                 config.user_y_sign, config.user_z, offsets)]
    return NodeLayout(bs=config.bs_position,
                      irs=list(config.irs_positions),
                      users=[tuple(map(float, u)) for u in users])


# ─────────────────────────────────────────────
# Scenario files
# ─────────────────────────────────────────────

_FLOAT_VECTORS = {
    "irs_normals", "user_anchor_x", "user_direction", "user_y_sign", "user_z"
}


def _floats(raw: str) -> list[float]:
    return [float(v) for v in raw.split(",") if v.strip()]


def _triples(raw: str) -> list[tuple[float, float, float]]:
    values = _floats(raw)
    if len(values) % 3:
        raise ValueError("expected x,y,z triples")
    return [tuple(values[i:i + 3]) for i in range(0, len(values), 3)]


def _parse_value(key: str, raw: str) -> Any:
    if key == "bs_position":
        (position, ) = _triples(raw)
        return position
    if key == "irs_positions":
        return _triples(raw)
    if key in _FLOAT_VECTORS:
        return _floats(raw)
    if key == "methods":
        return [m.strip() for m in raw.split(",") if m.strip()]
    # 스칼라는 pydantic 이 변환
    return raw


def _format_value(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if hasattr(value, "value"):
        return str(value.value)
    if isinstance(value, (list, tuple)):
        flat = []
        for item in value:
            flat.extend(item if isinstance(item, tuple) else [item])
        return ",".join(_format_value(v) for v in flat)
    return str(value)


def load_config(path: str | Path) -> ScenarioConfig:
    """Parse a scenario file on top of the defaults of its `setup` (1 if absent)"""
    path = Path(path)
    values: dict[str, Any] = {}
    lines: dict[str, int] = {}
    for number, line in enumerate(path.read_text().splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParseError(f"expected key=value, got {line!r}", number)
        key, raw = (part.strip() for part in line.split("=", 1))
        if key not in ScenarioConfig.model_fields:
            raise ConfigParseError(f"unknown key {key!r}", number)
        if key in values:
            raise ConfigParseError(f"duplicate key {key!r}", number)
        try:
            values[key] = _parse_value(key, raw)
        except ValueError as e:
            raise ConfigParseError(f"bad value for {key}: {e}", number) from e
        lines[key] = number

    try:
        base = build_setup(int(values.get("setup", 1)))
    except ValueError as e:
        raise ConfigParseError(f"invalid setup: {e}", lines.get("setup")) from e

    try:
        return ScenarioConfig.model_validate({**base.model_dump(), **values})
    except ValidationError as e:
        error = e.errors()[0]
        key = str(error["loc"][0]) if error["loc"] else None
        raise ConfigParseError(f"invalid {key or 'scenario'}: {error['msg']}",
                               lines.get(key)) from e


def write_config(config: ScenarioConfig, path: str | Path) -> Path:
    """Inverse of load_config"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = [f"# {config.name}"]
    body += [
        f"{key}={_format_value(getattr(config, key))}"
        for key in ScenarioConfig.model_fields
    ]
    path.write_text("\n".join(body) + "\n")
    return path
