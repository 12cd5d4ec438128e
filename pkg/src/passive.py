"""
🪞 Passive beamforming - IRS phases, AIC cross-gains, IRS-user association

w_{l,k} = conj(alpha_l) a_r^H Phi_l^H h_{l,k} / sqrt(M)   (realized gain)
w*_{l,k} = |alpha_l| / M * sum_m |h_{l,k}(m)|              (its maximum)
"""

from typing import Optional, Sequence

import numpy as np

from .channel import irs_arrival_response
from .errors import (
    InfeasibleAssociationError,
    InvalidArgumentError,
    SearchLimitError,
)
from .models import (
    ArrayGeometry,
    Association,
    GainMatrix,
    IrsUserChannel,
    PhaseConfig,
    RankOneChannel,
)

# assignments scored per vectorized batch
ENUMERATION_CHUNK = 1 << 16


def _coefficients(channel: IrsUserChannel | np.ndarray) -> np.ndarray:
    if isinstance(channel, IrsUserChannel):
        return channel.coefficients
    return np.asarray(channel, dtype=complex)


# ─────────────────────────────────────────────
# Phases and gains
# ─────────────────────────────────────────────


def optimal_phases(channel: IrsUserChannel | np.ndarray,
                   arrival: np.ndarray) -> np.ndarray:
    """theta_m = arg h(m) - arg a_r(m) mod 2pi (0 where h(m) = 0)"""
    h = _coefficients(channel)
    arrival = np.asarray(arrival)
    if h.shape != arrival.shape:
        raise InvalidArgumentError(
            f"channel and steering vector differ: {h.shape} vs {arrival.shape}")
    theta = np.where(h != 0, np.angle(h) - np.angle(arrival), 0.0)
    return np.mod(theta, 2 * np.pi)


def passive_gain(theta: np.ndarray, alpha: complex, arrival: np.ndarray,
                 channel: IrsUserChannel | np.ndarray) -> complex:
    h = _coefficients(channel)
    theta = np.asarray(theta, dtype=float)
    if not (h.shape == theta.shape == np.shape(arrival)):
        raise InvalidArgumentError("theta, a_r and h must have length M")
    weights = np.conj(arrival) * np.exp(-1j * theta)
    return complex(np.conj(alpha) * (weights @ h) / np.sqrt(h.shape[0]))


def max_gain_matrix(
        bs_irs: Sequence[RankOneChannel],
        irs_user: Sequence[Sequence[IrsUserChannel]]) -> GainMatrix:
    """W*: L x K nonnegative"""
    W = np.empty((len(bs_irs), len(irs_user[0])))
    for l, channel in enumerate(bs_irs):
        for k, h in enumerate(irs_user[l]):
            magnitudes = np.abs(h.coefficients)
            W[l, k] = abs(channel.gain) * magnitudes.sum() / magnitudes.size
    return W


def realized_gain_matrix(bs_irs: Sequence[RankOneChannel],
                         irs_user: Sequence[Sequence[IrsUserChannel]],
                         phases: PhaseConfig,
                         geometry: ArrayGeometry) -> GainMatrix:
    """W: L x K complex for the given phases"""
    W = np.empty((len(bs_irs), len(irs_user[0])), dtype=complex)
    for l, channel in enumerate(bs_irs):
        arrival = irs_arrival_response(channel, geometry)
        for k, h in enumerate(irs_user[l]):
            W[l, k] = passive_gain(phases.phases[l], channel.gain, arrival, h)
    return W


def _dirichlet_ratio(count: int, x: float, spacing_ratio: float) -> float:
    """|sin(n pi s x) / (n sin(pi s x))|, 1 on the grating lobes"""
    denominator = np.sin(np.pi * spacing_ratio * x)
    if abs(denominator) < 1e-15:
        return 1.0
    return abs(np.sin(count * np.pi * spacing_ratio * x) /
               (count * denominator))


def aic_cross_gain_los(alpha: complex,
                       beta_victim: complex,
                       serving: tuple[float, float],
                       victim: tuple[float, float],
                       rows: int,
                       cols: int,
                       spacing_ratio: float = 0.5) -> float:
    """|w_{l,k'}| of an IRS tuned to the serving user, LOS closed form

    `serving` and `victim` are (azimuth, elevation) of the IRS -> user
    departures. Rows pick up delta = cos w' sin p' - cos w sin p, columns
    gamma = sin w' - sin w.
    """
    (azimuth, elevation), (azimuth_v, elevation_v) = serving, victim
    delta = (np.cos(elevation_v) * np.sin(azimuth_v) -
             np.cos(elevation) * np.sin(azimuth))
    gamma = np.sin(elevation_v) - np.sin(elevation)
    return (abs(alpha) * abs(beta_victim) *
            _dirichlet_ratio(rows, delta, spacing_ratio) *
            _dirichlet_ratio(cols, gamma, spacing_ratio))


def rayleigh_aic_ratio(num_elements: int, draws: int,
                       rng: np.random.Generator) -> float:
    """Mean |w_{l,k'}| / w*_{l,k'} with phases tuned to k, i.i.d. CN(0, 1) channels"""
    if num_elements < 1 or draws < 1:
        raise InvalidArgumentError("M and draws must be positive")
    ratios = np.empty(draws)
    for i in range(draws):
        arrival = np.exp(
            2j * np.pi * rng.random(num_elements)) / np.sqrt(num_elements)
        served, victim = (np.sqrt(0.5) * (rng.standard_normal(
            (2, num_elements)) + 1j * rng.standard_normal((2, num_elements))))
        theta = optimal_phases(served, arrival)
        upper = np.abs(victim).sum() / num_elements
        ratios[i] = abs(passive_gain(theta, 1.0, arrival, victim)) / upper
    return float(ratios.mean())


# ─────────────────────────────────────────────
# Association
# ─────────────────────────────────────────────


def _check_shape(W: GainMatrix) -> np.ndarray:
    W = np.asarray(W, dtype=float)
    if W.ndim != 2 or 0 in W.shape:
        raise InvalidArgumentError("W* must be a non-empty L x K matrix")
    if W.shape[0] < W.shape[1]:
        raise InfeasibleAssociationError(
            f"L={W.shape[0]} IRSs cannot serve K={W.shape[1]} users")
    return W


def association_objective(W: GainMatrix,
                          assignment: Sequence[int] | Association) -> float:
    """sum_k 1 / ||w_k||^2, inf if a user is unserved"""
    if isinstance(assignment, Association):
        assignment = assignment.assignment
    W = np.asarray(W, dtype=float)
    served = np.zeros(W.shape[1])
    for l, k in enumerate(assignment):
        served[k] += W[l, k]**2
    if np.any(served <= 0):
        return float("inf")
    return float(np.sum(1.0 / served))


def associate_exhaustive(
        W: GainMatrix,
        limit: Optional[int] = None) -> tuple[Association, float]:
    """Global minimum of the association objective over all K^L assignments

    Assignments are visited in lexicographic order and the incumbent is only
    replaced on a strictly smaller objective.
    """
    W = _check_shape(W)
    L, K = W.shape
    if limit is None:
        from .config import settings
        limit = settings.search.exhaustive_limit
    total = K**L
    if total > limit:
        raise SearchLimitError(
            f"{total} assignments (K={K}, L={L}) exceed the exhaustive "
            f"limit {limit}; use the greedy method instead")

    power = W**2
    place = K**np.arange(L - 1, -1, -1)
    best_index, best_objective = -1, np.inf
    for start in range(0, total, ENUMERATION_CHUNK):
        index = np.arange(start, min(start + ENUMERATION_CHUNK, total))
        digits = (index[:, None] // place[None, :]) % K
        onehot = digits[:, :, None] == np.arange(K)[None, None, :]
        served = np.einsum("nlk,lk->nk", onehot, power)
        with np.errstate(divide="ignore"):
            objective = np.where(np.all(served > 0, axis=1),
                                 np.sum(1.0 / served, axis=1), np.inf)
        i = int(np.argmin(objective))
        if objective[i] < best_objective:
            best_index, best_objective = start + i, float(objective[i])

    if best_index < 0:
        raise InfeasibleAssociationError(
            "no assignment serves every user (some column of W* is zero)")
    digits = (best_index // place) % K
    return Association(assignment=tuple(int(k) for k in digits),
                       num_users=K), best_objective


def associate_greedy(W: GainMatrix) -> Association:
    """Greedy search

    Phase 1 (K rounds): largest entry among free IRSs and unserved users.
    Phase 2: every remaining IRS joins the user with its largest entry.
    Ties go to the smallest (l, k).
    """
    W = _check_shape(W)
    L, K = W.shape
    assignment = [-1] * L
    free_irs = np.ones(L, dtype=bool)
    unserved = np.ones(K, dtype=bool)
    for _ in range(K):
        candidates = np.where(free_irs[:, None] & unserved[None, :], W,
                              -np.inf)
        l, k = np.unravel_index(int(np.argmax(candidates)), W.shape)
        assignment[l] = int(k)
        # 집합은 누적(합집합)으로 갱신
        free_irs[l] = False
        unserved[k] = False

    for l in np.flatnonzero(free_irs):
        assignment[l] = int(np.argmax(W[l]))
    return Association(assignment=tuple(assignment), num_users=K)


def apply_association(association: Association,
                      bs_irs: Sequence[RankOneChannel],
                      irs_user: Sequence[Sequence[IrsUserChannel]],
                      geometry: ArrayGeometry) -> PhaseConfig:
    """Each IRS tuned to its assigned user"""
    if association.num_irs != len(bs_irs):
        raise InvalidArgumentError(
            f"association covers {association.num_irs} IRSs, "
            f"channels have {len(bs_irs)}")
    phases = [
        optimal_phases(irs_user[l][k],
                       irs_arrival_response(bs_irs[l], geometry))
        for l, k in enumerate(association.assignment)
    ]
    return PhaseConfig(phases=np.stack(phases))


def theoretical_min_sinr(association: Association, W: GainMatrix,
                         power: float, num_antennas: int, num_elements: int,
                         noise_power: float) -> float:
    """Interference-free SINR P N M^2 / sigma^2 / sum_k (sum_{l in S_k} w*_{l,k}^2)^-1"""
    if not association.serves_all_users:
        raise InfeasibleAssociationError(
            f"association {association.assignment} leaves a user unserved")
    if not (power > 0 and noise_power > 0):
        raise InvalidArgumentError("P and sigma^2 must be > 0")
    objective = association_objective(W, association)
    if not np.isfinite(objective):
        raise InfeasibleAssociationError("a served user has zero gain")
    return (power * num_antennas * num_elements**2 / noise_power /
            objective)
