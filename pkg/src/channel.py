"""
📡 Channel synthesis - steering vectors, path loss, BS-IRS / IRS-user / baseline channels

Conventions (all angles in radians):
  - BS ULA and IRS UPA spacing d / lambda = 0.5 unless a geometry says otherwise.
  - Array frames: the broadside normal lies in the xy-plane at azimuth
    `normal`; the local horizontal axis is the normal rotated by +90 deg.
    Azimuth = atan2(delta . axis, delta . normal), elevation = arcsin(dz / |delta|).
  - IRS rows run along the horizontal axis (M_y), columns along z (M_z);
    UPA vectors are flattened row-major in (m1, m2).
"""

from typing import NamedTuple, Sequence

import numpy as np

from .errors import InvalidArgumentError
from .models import (
    ArrayGeometry,
    ChannelKind,
    CompositeChannel,
    IrsUserChannel,
    LosComponent,
    Method,
    PathLossModel,
    PhaseConfig,
    RankOneChannel,
)


class Direction(NamedTuple):
    """Azimuth / elevation of a target seen from an array"""
    azimuth: float
    elevation: float


class TrialStreams(NamedTuple):
    """Independent random streams of one Monte-Carlo trial"""
    geometry: np.random.Generator
    bs_irs: np.random.Generator
    irs_user: np.random.Generator
    baseline: np.random.Generator
    solver: dict[Method, np.random.Generator]  # random fixed-point init


def trial_streams(master_seed: int, trial_index: int) -> TrialStreams:
    """Counter-style derivation: SeedSequence(master_seed, spawn_key=(trial,))

    Each stream is a child of that sequence, so enabling a method never shifts
    the draws seen by another, and no draw count depends on M or N for LOS.
    """
    root = np.random.SeedSequence(entropy=master_seed,
                                  spawn_key=(trial_index, ))
    children = [np.random.default_rng(s) for s in root.spawn(4 + len(Method))]
    return TrialStreams(*children[:4],
                        solver=dict(zip(Method, children[4:])))


def complex_gaussian(variance: float,
                     size: int | tuple[int, ...] | None,
                     rng: np.random.Generator):
    """CN(0, variance): sqrt(variance / 2) (x + jy) with x, y ~ N(0, 1)"""
    if variance < 0:
        raise InvalidArgumentError(f"variance must be >= 0, got {variance}")
    real = rng.standard_normal(size)
    imag = rng.standard_normal(size)
    return np.sqrt(variance / 2.0) * (real + 1j * imag)


# ─────────────────────────────────────────────
# Steering vectors
# ─────────────────────────────────────────────


def ula_response(psi: float,
                 num_antennas: int,
                 spacing_ratio: float = 0.5) -> np.ndarray:
    """Unit-norm ULA response a_t(psi)"""
    if num_antennas < 1:
        raise InvalidArgumentError(
            f"ULA needs at least one antenna, got {num_antennas}")
    n = np.arange(num_antennas)
    phase = 2 * np.pi * spacing_ratio * n * np.sin(psi)
    return np.exp(1j * phase) / np.sqrt(num_antennas)


def ula_matrix(psis: Sequence[float],
               num_antennas: int,
               spacing_ratio: float = 0.5) -> np.ndarray:
    """Columns a_t(psi_l), N x len(psis)"""
    if num_antennas < 1:
        raise InvalidArgumentError(
            f"ULA needs at least one antenna, got {num_antennas}")
    n = np.arange(num_antennas)[:, None]
    phase = 2 * np.pi * spacing_ratio * n * np.sin(np.asarray(psis))[None, :]
    return np.exp(1j * phase) / np.sqrt(num_antennas)


def upa_response(azimuth: float,
                 elevation: float,
                 rows: int,
                 cols: int,
                 spacing_ratio: float = 0.5) -> np.ndarray:
    """Unit-norm UPA response a_r(phi, omega), row-major over (m1, m2)"""
    if rows < 1 or cols < 1:
        raise InvalidArgumentError(
            f"UPA dimensions must be positive, got {rows}x{cols}")
    m1 = np.arange(rows)[:, None]
    m2 = np.arange(cols)[None, :]
    phase = 2 * np.pi * spacing_ratio * (
        m1 * np.cos(elevation) * np.sin(azimuth) + m2 * np.sin(elevation))
    return (np.exp(1j * phase) / np.sqrt(rows * cols)).ravel()


def steering_correlation(psis: Sequence[float],
                         num_antennas: int,
                         spacing_ratio: float = 0.5) -> float:
    """max_{i != j} |a_t(psi_i)^H a_t(psi_j)| (0 for a single direction)"""
    if len(psis) < 2:
        return 0.0
    B = ula_matrix(psis, num_antennas, spacing_ratio)
    gram = np.abs(B.conj().T @ B)
    np.fill_diagonal(gram, 0.0)
    return float(gram.max())


# ─────────────────────────────────────────────
# Geometry
# ─────────────────────────────────────────────


def path_loss_gain(distance: float, model: PathLossModel) -> float:
    """Linear power gain C0 (d / D0)^-a"""
    if distance <= 0:
        raise InvalidArgumentError(f"distance must be > 0, got {distance}")
    return model.c0_linear * (distance / model.reference_distance)**(
        -model.exponent)


def angles_from_geometry(source_position: Sequence[float],
                         target_position: Sequence[float],
                         normal: float) -> Direction:
    """Direction of target seen from an array at source with broadside azimuth `normal`"""
    delta = np.asarray(target_position, dtype=float) - np.asarray(
        source_position, dtype=float)
    distance = np.linalg.norm(delta)
    if distance == 0:
        raise InvalidArgumentError("source and target positions coincide")
    broadside = np.array([np.cos(normal), np.sin(normal)])
    axis = np.array([-np.sin(normal), np.cos(normal)])
    azimuth = np.arctan2(delta[:2] @ axis, delta[:2] @ broadside)
    elevation = np.arcsin(np.clip(delta[2] / distance, -1.0, 1.0))
    return Direction(float(azimuth), float(elevation))


def _distance(a: Sequence[float], b: Sequence[float]) -> float:
    distance = float(np.linalg.norm(np.subtract(a, b, dtype=float)))
    if distance == 0:
        raise InvalidArgumentError("node positions coincide")
    return distance


# ─────────────────────────────────────────────
# Random channels
# ─────────────────────────────────────────────


def sample_bs_irs(bs_position: Sequence[float],
                  irs_position: Sequence[float],
                  path_model: PathLossModel,
                  rng: np.random.Generator,
                  *,
                  bs_normal: float = np.pi,
                  irs_normal: float = 0.0) -> RankOneChannel:
    """Rank-one BS -> IRS channel with alpha ~ CN(0, kappa)"""
    kappa = path_loss_gain(_distance(bs_position, irs_position), path_model)
    aod = angles_from_geometry(bs_position, irs_position, bs_normal)
    aoa = angles_from_geometry(irs_position, bs_position, irs_normal)
    alpha = complex(complex_gaussian(kappa, None, rng))
    return RankOneChannel(gain=alpha,
                          aoa_azimuth=aoa.azimuth,
                          aoa_elevation=aoa.elevation,
                          aod_azimuth=aod.azimuth)


def sample_irs_user(irs_position: Sequence[float],
                    user_position: Sequence[float],
                    path_model: PathLossModel,
                    kind: ChannelKind,
                    rng: np.random.Generator,
                    geometry: ArrayGeometry,
                    *,
                    irs_normal: float = 0.0) -> IrsUserChannel:
    """IRS -> user channel: LOS h = beta sqrt(M) a_r, or Rayleigh CN(0, zeta I)"""
    variance = path_loss_gain(_distance(irs_position, user_position),
                              path_model)
    M = geometry.irs_elements
    if ChannelKind(kind) == ChannelKind.RAYLEIGH:
        coefficients = complex_gaussian(variance, M, rng)
        return IrsUserChannel(coefficients=coefficients,
                              kind=ChannelKind.RAYLEIGH,
                              variance=variance)

    aod = angles_from_geometry(irs_position, user_position, irs_normal)
    beta = complex(complex_gaussian(variance, None, rng))
    steering = upa_response(aod.azimuth, aod.elevation, geometry.irs_rows,
                            geometry.irs_cols, geometry.spacing_ratio)
    return IrsUserChannel(
        coefficients=beta * np.sqrt(M) * steering,
        kind=ChannelKind.LOS,
        los=LosComponent(gain=beta,
                         aod_azimuth=aod.azimuth,
                         aod_elevation=aod.elevation),
        variance=variance,
    )


def conventional_channel(num_antennas: int,
                         path_count: int,
                         distance: float,
                         path_model: PathLossModel,
                         rng: np.random.Generator,
                         *,
                         per_path_normalization: bool = False,
                         spacing_ratio: float = 0.5) -> np.ndarray:
    """Geometric BS -> user channel sqrt(N) sum_l alpha_l a_t(psi_l) without IRS

    Each path gain has variance kappa (literal) or kappa / L~ when
    per_path_normalization is set.
    """
    if path_count < 1:
        raise InvalidArgumentError(
            f"path count must be >= 1, got {path_count}")
    kappa = path_loss_gain(distance, path_model)
    if per_path_normalization:
        kappa /= path_count
    psis = rng.uniform(-np.pi / 2, np.pi / 2, path_count)
    gains = complex_gaussian(kappa, path_count, rng)
    return np.sqrt(num_antennas) * ula_matrix(psis, num_antennas,
                                              spacing_ratio) @ gains


# ─────────────────────────────────────────────
# Composite channel
# ─────────────────────────────────────────────


def irs_arrival_response(channel: RankOneChannel,
                         geometry: ArrayGeometry) -> np.ndarray:
    """a_r(phi_l, theta_l) of the BS -> IRS path"""
    return upa_response(channel.aoa_azimuth, channel.aoa_elevation,
                        geometry.irs_rows, geometry.irs_cols,
                        geometry.spacing_ratio)


def materialize_bs_irs(channel: RankOneChannel,
                       geometry: ArrayGeometry) -> np.ndarray:
    """Dense M x N matrix G_l (debug path)"""
    N, M = geometry.bs_antennas, geometry.irs_elements
    a_r = irs_arrival_response(channel, geometry)
    a_t = ula_response(channel.aod_azimuth, N, geometry.spacing_ratio)
    return np.sqrt(N * M) * channel.gain * np.outer(a_r, a_t.conj())


def composite_channel(bs_irs: Sequence[RankOneChannel],
                      irs_user: Sequence[Sequence[IrsUserChannel]],
                      phases: PhaseConfig,
                      geometry: ArrayGeometry) -> CompositeChannel:
    """h_k = sum_l G_l^H Phi_l^H h_{l,k} = sqrt(N M^2) sum_l a_t(psi_l) w_{l,k}"""
    L = len(bs_irs)
    N, M = geometry.bs_antennas, geometry.irs_elements
    if len(irs_user) != L or phases.num_irs != L:
        raise InvalidArgumentError(
            f"expected {L} IRSs in irs_user and phases, got "
            f"{len(irs_user)} and {phases.num_irs}")
    K = len(irs_user[0]) if L else 0
    if K == 0 or any(len(row) != K for row in irs_user):
        raise InvalidArgumentError("irs_user must be a non-empty L x K grid")
    if phases.num_elements != M or any(h.num_elements != M for row in irs_user
                                       for h in row):
        raise InvalidArgumentError(f"IRS channels must have M={M} elements")

    gains = np.empty((L, K), dtype=complex)
    for l, channel in enumerate(bs_irs):
        # a_r^H Phi^H 를 한 번만 계산
        weights = np.conj(irs_arrival_response(channel, geometry) *
                          phases.reflection(l))
        users = np.stack([h.coefficients for h in irs_user[l]])
        gains[l] = np.conj(channel.gain) * (users @ weights) / np.sqrt(M)

    B = ula_matrix([c.aod_azimuth for c in bs_irs], N, geometry.spacing_ratio)
    return CompositeChannel(vectors=np.sqrt(N * M**2) * B @ gains)
