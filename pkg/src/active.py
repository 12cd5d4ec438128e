"""
🎯 Active beamforming - max-min SINR balancing for fixed IRS phases

Uplink-downlink duality:
  1. virtual powers q from the fixed point q_k = tau / g_k(q), sum(q) = P,
     g_k(q) = h_k^H (sum_{i != k} q_i h_i h_i^H + sigma^2 I)^-1 h_k
  2. precoders f_k ~ (sum_{i != k} q_i h_i h_i^H + sigma^2 I)^-1 h_k
  3. downlink powers from A p = tau sigma^2 1
"""

from typing import Optional

import numpy as np
from scipy.linalg import cho_factor, cho_solve, lu_factor, lu_solve

from .errors import (
    DegenerateChannelError,
    InfeasibleBalancingError,
    InvalidArgumentError,
)
from .models import (
    BeamformingSolution,
    CompositeChannel,
    FixedPointResult,
    SolverSettings,
)

PIVOT_THRESHOLD = 1e-12


def _as_matrix(H: CompositeChannel | np.ndarray) -> np.ndarray:
    if isinstance(H, CompositeChannel):
        return H.vectors
    H = np.asarray(H, dtype=complex)
    if H.ndim == 1:
        H = H[:, None]
    if H.ndim != 2 or H.shape[1] < 1:
        raise InvalidArgumentError("H must be an N x K matrix with K >= 1")
    return H


def _check_budget(power: float, noise_power: float) -> None:
    if not power > 0:
        raise InvalidArgumentError(f"P must be > 0, got {power}")
    if not noise_power > 0:
        raise InvalidArgumentError(f"sigma^2 must be > 0, got {noise_power}")


def _interference_plus_noise(H: np.ndarray, q: np.ndarray, k: int,
                             noise_power: float) -> np.ndarray:
    """sum_{i != k} q_i h_i h_i^H + sigma^2 I (Hermitian positive definite)"""
    others = np.delete(np.arange(H.shape[1]), k)
    Hk = H[:, others] * np.sqrt(q[others])
    return Hk @ Hk.conj().T + noise_power * np.eye(H.shape[0])


def quadratic_forms(H: CompositeChannel | np.ndarray, q: np.ndarray,
                    noise_power: float) -> np.ndarray:
    """g_k = h_k^H R_k^-1 h_k for every user"""
    H = _as_matrix(H)
    forms = np.empty(H.shape[1])
    for k in range(H.shape[1]):
        factor = cho_factor(_interference_plus_noise(H, q, k, noise_power))
        forms[k] = np.real(H[:, k].conj() @ cho_solve(factor, H[:, k]))
    return forms


def fixed_point_q(H: CompositeChannel | np.ndarray,
                  power: float,
                  noise_power: float,
                  settings: Optional[SolverSettings] = None,
                  *,
                  initial: Optional[np.ndarray] = None,
                  rng: Optional[np.random.Generator] = None
                  ) -> FixedPointResult:
    """Virtual powers q0 and balanced SINR tau0

    Starts from P/K (or `initial`, or a random point when
    settings.random_init). Stops once the relative residual
    max_k |q_k - tau/g_k| / q_k <= tolerance; otherwise returns the best
    iterate with converged=False.
    """
    H = _as_matrix(H)
    _check_budget(power, noise_power)
    settings = settings or SolverSettings.from_settings()
    K = H.shape[1]
    if not np.all(np.linalg.norm(H, axis=0) > 0):
        raise DegenerateChannelError("every user channel must be nonzero")

    if initial is not None:
        q = np.asarray(initial, dtype=float)
        if q.shape != (K, ) or not np.all(q > 0):
            raise InvalidArgumentError(
                f"initial q must be {K} positive values")
    elif settings.random_init:
        q = (rng or np.random.default_rng()).uniform(0.1, 1.0, K)
    else:
        q = np.ones(K)
    q = power * q / q.sum()

    best: Optional[tuple[float, np.ndarray, float]] = None
    for iteration in range(1, settings.max_iterations + 1):
        forms = quadratic_forms(H, q, noise_power)
        tau = power / np.sum(1.0 / forms)
        q_next = tau / forms
        residual = float(np.max(np.abs(q - q_next) / q))
        if residual <= settings.tolerance:
            return FixedPointResult(virtual_powers=q,
                                    balanced_sinr=float(tau),
                                    iterations=iteration,
                                    converged=True,
                                    residual=residual)
        if best is None or residual < best[0]:
            best = (residual, q, float(tau))
        q = q_next

    residual, q, tau = best
    return FixedPointResult(virtual_powers=q,
                            balanced_sinr=tau,
                            iterations=settings.max_iterations,
                            converged=False,
                            residual=residual)


def precoders(H: CompositeChannel | np.ndarray, q: np.ndarray,
              noise_power: float) -> np.ndarray:
    """Unit-norm MMSE-type precoders F (N x K)"""
    H = _as_matrix(H)
    q = np.asarray(q, dtype=float)
    if q.shape != (H.shape[1], ) or not np.all(q > 0):
        raise InvalidArgumentError("virtual powers must be positive, one per user")
    if not noise_power > 0:
        raise InvalidArgumentError(f"sigma^2 must be > 0, got {noise_power}")

    F = np.empty_like(H)
    for k in range(H.shape[1]):
        factor = cho_factor(_interference_plus_noise(H, q, k, noise_power))
        F[:, k] = cho_solve(factor, H[:, k])
    return F / np.linalg.norm(F, axis=0)


def coupling_gains(H: CompositeChannel | np.ndarray,
                   F: np.ndarray) -> np.ndarray:
    """|h_k^H f_i|^2 indexed [k, i]"""
    return np.abs(_as_matrix(H).conj().T @ F)**2


def power_alloc(H: CompositeChannel | np.ndarray, F: np.ndarray, tau: float,
                noise_power: float) -> np.ndarray:
    """Downlink powers equalizing every SINR at tau

    Row k of A: A_kk = |h_k^H f_k|^2, A_ki = -tau |h_k^H f_i|^2.
    """
    gains = coupling_gains(H, F)
    K = gains.shape[0]
    A = -tau * gains
    A[np.diag_indices(K)] = np.diag(gains)
    b = np.full(K, tau * noise_power)

    lu, piv = lu_factor(A, check_finite=True)
    pivots = np.abs(np.diag(lu))
    if pivots.max() == 0 or pivots.min() / pivots.max() < PIVOT_THRESHOLD:
        raise InfeasibleBalancingError(
            f"power allocation system is singular (tau={tau:.4g})")
    p = lu_solve((lu, piv), b)
    if not np.all(p > 0):
        raise InfeasibleBalancingError(
            f"non-positive downlink power for tau={tau:.4g}: {p}")
    return p


def per_user_sinr(H: CompositeChannel | np.ndarray, F: np.ndarray,
                  p: np.ndarray, noise_power: float) -> np.ndarray:
    gains = coupling_gains(H, F)
    received = gains * np.asarray(p, dtype=float)[None, :]
    signal = np.diag(received)
    interference = received.sum(axis=1) - signal
    return signal / (interference + noise_power)


def solve_active(H: CompositeChannel | np.ndarray,
                 power: float,
                 noise_power: float,
                 settings: Optional[SolverSettings] = None,
                 *,
                 rng: Optional[np.random.Generator] = None
                 ) -> BeamformingSolution:
    """fixed_point_q -> precoders -> power_alloc"""
    fixed_point = fixed_point_q(H, power, noise_power, settings, rng=rng)
    F = precoders(H, fixed_point.virtual_powers, noise_power)
    p = power_alloc(H, F, fixed_point.balanced_sinr, noise_power)
    return BeamformingSolution(precoders=F,
                               powers=p,
                               virtual_powers=fixed_point.virtual_powers,
                               balanced_sinr=fixed_point.balanced_sinr,
                               iterations=fixed_point.iterations,
                               converged=fixed_point.converged)
