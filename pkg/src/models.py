"""
📦 Data Models
"""

import math
from enum import Enum
from typing import Optional

import numpy as np
from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    computed_field,
    field_validator,
    model_validator,
)

from .errors import InvalidArgumentError

Position = tuple[float, float, float]

# setup 1/2: BS midway between IRS pairs 60 m apart
SETUP_SPAN = 60.0

# W / W* 는 L×K numpy 배열 그대로 사용 (complex: 실현 이득, real: 최대 이득)
GainMatrix = np.ndarray


def check_user_distance(d: float) -> float:
    """Users stay strictly between the IRS pairs: 0 < d < span / 2"""
    if not 0 < d < SETUP_SPAN / 2:
        raise InvalidArgumentError(
            f"user distance d must be in (0, {SETUP_SPAN / 2:g}), got {d}")
    return d


def dbm_to_watts(dbm: float) -> float:
    """-10 dBm -> 1e-4 W"""
    return 10.0**((dbm - 30.0) / 10.0)


def db_to_linear(db: float) -> float:
    return 10.0**(db / 10.0)


def linear_to_db(value: float) -> float:
    if value <= 0 or not math.isfinite(value):
        return float("nan")
    return 10.0 * math.log10(value)


class ChannelKind(str, Enum):
    """IRS-user channel model"""
    LOS = "los"  # LOS-dominated, steering vector times complex gain
    RAYLEIGH = "rayleigh"  # i.i.d. CN(0, zeta I)


class Method(str, Enum):
    """Max-min SINR methods compared per trial"""
    EXHAUSTIVE = "exhaustive"  # proposed solution I
    GREEDY = "greedy"  # proposed solution II
    THEORETICAL = "theoretical"  # closed form, cross terms neglected
    CONVENTIONAL = "conventional"  # massive MIMO without IRS


class SweepVariable(str, Enum):
    """Sweepable scenario parameter"""
    M = "M"
    N = "N"
    D = "d"


class _FrozenModel(BaseModel):
    model_config = ConfigDict(frozen=True)


class _ArrayModel(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)


# ─────────────────────────────────────────────
# Channel objects
# ─────────────────────────────────────────────


class ArrayGeometry(_FrozenModel):
    """BS ULA size and IRS UPA shape"""
    bs_antennas: int = Field(ge=1)  # N
    irs_rows: int = Field(ge=1)  # M_y
    irs_cols: int = Field(ge=1)  # M_z
    spacing_ratio: float = Field(default=0.5, gt=0)  # d / lambda

    @property
    def irs_elements(self) -> int:
        """M = M_y * M_z"""
        return self.irs_rows * self.irs_cols


class PathLossModel(_FrozenModel):
    """C0 (d / D0)^-a"""
    c0_db: float = -30.0
    reference_distance: float = Field(default=1.0, gt=0)
    exponent: float = Field(gt=0)

    @property
    def c0_linear(self) -> float:
        return db_to_linear(self.c0_db)


class RankOneChannel(_FrozenModel):
    """BS -> IRS channel G = sqrt(NM) alpha a_r(phi, theta) a_t^H(psi), kept factored"""
    gain: complex  # alpha
    aoa_azimuth: float
    aoa_elevation: float
    aod_azimuth: float


class LosComponent(_FrozenModel):
    """LOS parameters of an IRS -> user channel"""
    gain: complex  # beta
    aod_azimuth: float
    aod_elevation: float


class IrsUserChannel(_ArrayModel):
    """IRS -> user channel h (length M)"""
    coefficients: np.ndarray
    kind: ChannelKind
    los: Optional[LosComponent] = None
    variance: float = Field(ge=0)  # rho (LOS gain variance) or zeta (Rayleigh)

    @model_validator(mode="after")
    def _check_kind(self) -> "IrsUserChannel":
        if self.coefficients.ndim != 1:
            raise ValueError("coefficients must be a vector")
        if self.kind == ChannelKind.LOS and self.los is None:
            raise ValueError("LOS channel needs its LOS component")
        return self

    @property
    def num_elements(self) -> int:
        return self.coefficients.shape[0]


class CompositeChannel(_ArrayModel):
    """Effective BS -> user channels, column k is h_k (N x K)"""
    vectors: np.ndarray

    @field_validator("vectors")
    @classmethod
    def _check_matrix(cls, value: np.ndarray) -> np.ndarray:
        if value.ndim != 2:
            raise ValueError("composite channel must be an N x K matrix")
        return value

    @property
    def num_antennas(self) -> int:
        return self.vectors.shape[0]

    @property
    def num_users(self) -> int:
        return self.vectors.shape[1]


# ─────────────────────────────────────────────
# Passive beamforming
# ─────────────────────────────────────────────


class PhaseConfig(_ArrayModel):
    """Per-IRS phase shifts theta_l (L x M), reduced to [0, 2pi)"""
    phases: np.ndarray

    @field_validator("phases", mode="before")
    @classmethod
    def _wrap(cls, value: np.ndarray) -> np.ndarray:
        value = np.atleast_2d(np.asarray(value, dtype=float))
        return np.mod(value, 2 * np.pi)

    @property
    def num_irs(self) -> int:
        return self.phases.shape[0]

    @property
    def num_elements(self) -> int:
        return self.phases.shape[1]

    def reflection(self, irs: int) -> np.ndarray:
        """Diagonal of Phi_l"""
        return np.exp(1j * self.phases[irs])


class Association(_FrozenModel):
    """IRS l -> user assignment[l] (0-based)"""
    assignment: tuple[int, ...]
    num_users: int = Field(ge=1)

    @model_validator(mode="after")
    def _check_range(self) -> "Association":
        if any(k < 0 or k >= self.num_users for k in self.assignment):
            raise ValueError("assignment refers to an unknown user")
        return self

    @property
    def num_irs(self) -> int:
        return len(self.assignment)

    def serving(self, user: int) -> list[int]:
        """IRS indices serving a user"""
        return [l for l, k in enumerate(self.assignment) if k == user]

    @property
    def serves_all_users(self) -> bool:
        return set(self.assignment) == set(range(self.num_users))


# ─────────────────────────────────────────────
# Active beamforming
# ─────────────────────────────────────────────


class SolverSettings(_FrozenModel):
    """Fixed-point stopping rule"""
    tolerance: float = Field(default=1e-9, gt=0)
    max_iterations: int = Field(default=500, ge=1)
    random_init: bool = False

    @classmethod
    def from_settings(cls) -> "SolverSettings":
        from .config import settings
        return cls(
            tolerance=settings.solver.tolerance,
            max_iterations=settings.solver.max_iterations,
            random_init=settings.solver.random_init,
        )


class FixedPointResult(_ArrayModel):
    """Virtual (uplink) powers and balanced SINR"""
    virtual_powers: np.ndarray  # q0
    balanced_sinr: float  # tau0
    iterations: int
    converged: bool
    residual: float


class BeamformingSolution(_ArrayModel):
    """Max-min SINR active beamforming for fixed phases"""
    precoders: np.ndarray  # F, N x K, unit columns
    powers: np.ndarray  # p0
    virtual_powers: np.ndarray  # q0
    balanced_sinr: float  # tau0
    iterations: int
    converged: bool


# ─────────────────────────────────────────────
# Scenario / experiment
# ─────────────────────────────────────────────

PROPOSED_METHODS = (Method.EXHAUSTIVE, Method.GREEDY, Method.THEORETICAL)


class ScenarioConfig(_FrozenModel):
    """Geometry and link budget of one simulation scenario

    Users are generators: user k sits at
    x = user_anchor_x[k] + user_direction[k] * user_distance,
    y = user_y_sign[k] * U(0, user_offset_max), z = user_z[k].
    """
    name: str = "setup1"
    setup: int = 1

    # Geometry (meters, normals as azimuth of the broadside in the xy-plane)
    bs_position: Position = (30.0, 0.0, 0.3)
    bs_normal: float = math.pi
    irs_positions: list[Position]
    irs_normals: list[float]
    user_anchor_x: list[float]
    user_direction: list[float]
    user_y_sign: list[float]
    user_z: list[float]
    user_offset_max: float = Field(default=10.0, ge=0)
    user_distance: float = Field(default=5.0, gt=0)  # d

    # Arrays
    bs_antennas: int = Field(default=32, ge=1)  # N
    irs_rows: int = Field(default=20, ge=1)  # M_y
    irs_cols: int = Field(default=20, ge=1)  # M_z
    spacing_ratio: float = Field(default=0.5, gt=0)

    # Link budget
    transmit_power_dbm: float = -10.0  # P
    noise_power_dbm: float = -80.0  # sigma_z^2
    c0_db: float = -30.0
    reference_distance: float = Field(default=1.0, gt=0)
    a_los: float = Field(default=2.0, gt=0)
    a_nlos: float = Field(default=3.5, gt=0)

    # Conventional baseline
    baseline_paths: int = Field(default=100, ge=1)  # L~
    baseline_per_path_normalization: bool = False

    irs_user_channel: ChannelKind = ChannelKind.LOS
    trials: int = Field(default=200, ge=1)
    master_seed: int = Field(default=2020, ge=0, lt=2**64)
    methods: list[Method] = Field(default_factory=lambda: list(Method))

    @field_validator("user_distance")
    @classmethod
    def _check_distance(cls, value: float) -> float:
        return check_user_distance(value)

    @model_validator(mode="after")
    def _check_consistency(self) -> "ScenarioConfig":
        if len(self.irs_normals) != len(self.irs_positions):
            raise ValueError("irs_normals must match irs_positions")
        user_fields = (self.user_direction, self.user_y_sign, self.user_z)
        if any(len(f) != len(self.user_anchor_x) for f in user_fields):
            raise ValueError("user_* vectors must have equal length")
        if not self.user_anchor_x:
            raise ValueError("at least one user is required")
        if not self.methods:
            raise ValueError("at least one method is required")
        if any(m in PROPOSED_METHODS for m in self.methods):
            if self.num_irs < self.num_users:
                raise ValueError(
                    f"L={self.num_irs} < K={self.num_users}: every user "
                    "needs its own IRS")
        return self

    @property
    def num_irs(self) -> int:
        return len(self.irs_positions)

    @property
    def num_users(self) -> int:
        return len(self.user_anchor_x)

    @property
    def irs_elements(self) -> int:
        return self.irs_rows * self.irs_cols

    @property
    def transmit_power_w(self) -> float:
        return dbm_to_watts(self.transmit_power_dbm)

    @property
    def noise_power_w(self) -> float:
        return dbm_to_watts(self.noise_power_dbm)

    @property
    def array_geometry(self) -> ArrayGeometry:
        return ArrayGeometry(
            bs_antennas=self.bs_antennas,
            irs_rows=self.irs_rows,
            irs_cols=self.irs_cols,
            spacing_ratio=self.spacing_ratio,
        )

    @property
    def los_path_loss(self) -> PathLossModel:
        return PathLossModel(c0_db=self.c0_db,
                             reference_distance=self.reference_distance,
                             exponent=self.a_los)

    @property
    def nlos_path_loss(self) -> PathLossModel:
        return PathLossModel(c0_db=self.c0_db,
                             reference_distance=self.reference_distance,
                             exponent=self.a_nlos)

    def with_sweep_value(self, variable: SweepVariable,
                         value: float) -> "ScenarioConfig":
        """Copy with M, N or d replaced (M changes M_z, M_y stays fixed)"""
        variable = SweepVariable(variable)
        if variable == SweepVariable.M:
            elements = int(round(value))
            if elements % self.irs_rows:
                raise InvalidArgumentError(
                    f"M={elements} is not a multiple of M_y={self.irs_rows}")
            update = {"irs_cols": elements // self.irs_rows}
        elif variable == SweepVariable.N:
            update = {"bs_antennas": int(round(value))}
        else:
            update = {"user_distance": check_user_distance(float(value))}
        return self.model_validate({**self.model_dump(), **update})


class NodeLayout(_FrozenModel):
    """Realized node coordinates of one trial"""
    bs: Position
    irs: list[Position]
    users: list[Position]


class TrialChannels(_ArrayModel):
    """Every channel drawn for one trial"""
    layout: NodeLayout
    bs_irs: list[RankOneChannel]
    irs_user: list[list[IrsUserChannel]]  # [l][k]
    baseline: Optional[np.ndarray] = None  # N x K, conventional system


class MethodOutcome(_FrozenModel):
    """Result of one method in one trial"""
    method: Method
    min_sinr: float
    association: Optional[tuple[int, ...]] = None
    iterations: Optional[int] = None
    converged: Optional[bool] = None


class TrialResult(_FrozenModel):
    """Per-trial min-SINR of every enabled method"""
    trial_index: int
    master_seed: int
    min_sinr: dict[Method, float]
    associations: dict[Method, tuple[int, ...]] = Field(default_factory=dict)
    iterations: dict[Method, int] = Field(default_factory=dict)
    converged: dict[Method, bool] = Field(default_factory=dict)
    errors: dict[Method, str] = Field(default_factory=dict)
    wall_time_s: float = 0.0

    @computed_field
    @property
    def min_sinr_db(self) -> dict[Method, float]:
        return {m: linear_to_db(v) for m, v in self.min_sinr.items()}


class SweepRow(_FrozenModel):
    """One CSV row"""
    sweep_var: str
    value: float
    method: Method
    min_sinr_db_mean: float
    min_sinr_db_std: float
    trials: int
    seed: int


class SweepResult(_FrozenModel):
    """Aggregated sweep, one row per (value, method)"""
    variable: SweepVariable
    values: list[float]
    methods: list[Method]
    trials: int
    seed: int
    rows: list[SweepRow]
    trial_results: list[list[TrialResult]] = Field(default_factory=list,
                                                   repr=False)

    def mean_db(self, method: Method) -> list[float]:
        method = Method(method)
        by_value = {r.value: r.min_sinr_db_mean for r in self.rows
                    if r.method == method}
        return [by_value[v] for v in self.values]


class BaselineCrossover(_FrozenModel):
    """Proposed vs conventional crossover in M under both baseline normalizations"""
    method: Method
    values: list[float]
    trials: int
    band: tuple[float, float]
    literal: Optional[float] = None  # None: the curves never cross
    per_path: Optional[float] = None

    def in_band(self, value: Optional[float]) -> bool:
        return value is not None and self.band[0] <= value <= self.band[1]

    @property
    def consistent(self) -> bool:
        """Both normalizations cross inside the band"""
        return self.in_band(self.literal) and self.in_band(self.per_path)
