"""
🪞 Passive beamforming and association tests
"""

import itertools

import numpy as np
import pytest

from src.channel import (
    complex_gaussian,
    irs_arrival_response,
    sample_bs_irs,
    sample_irs_user,
    upa_response,
)
from src.errors import (
    InfeasibleAssociationError,
    SearchLimitError,
)
from src.models import (
    ArrayGeometry,
    Association,
    ChannelKind,
    IrsUserChannel,
    LosComponent,
    PathLossModel,
    RankOneChannel,
)
from src.passive import (
    aic_cross_gain_los,
    apply_association,
    associate_exhaustive,
    associate_greedy,
    association_objective,
    max_gain_matrix,
    optimal_phases,
    passive_gain,
    rayleigh_aic_ratio,
    realized_gain_matrix,
    theoretical_min_sinr,
)

LOS = PathLossModel(c0_db=-30.0, exponent=2.0)


def _random_arrival(rng, M):
    return np.exp(2j * np.pi * rng.random(M)) / np.sqrt(M)


def _los_channel(beta, azimuth, elevation, rows, cols):
    M = rows * cols
    return IrsUserChannel(coefficients=beta * np.sqrt(M) *
                          upa_response(azimuth, elevation, rows, cols),
                          kind=ChannelKind.LOS,
                          los=LosComponent(gain=beta,
                                           aod_azimuth=azimuth,
                                           aod_elevation=elevation),
                          variance=abs(beta)**2)


# ─────────────────────────────────────────────
# Phases and gains
# ─────────────────────────────────────────────


def test_optimal_phases_for_aligned_channel_are_zero():
    h = np.array([0.5, 2.0, 1.0, 3.0], dtype=complex)
    arrival = np.full(4, 0.5, dtype=complex)
    np.testing.assert_allclose(optimal_phases(h, arrival), np.zeros(4))


def test_optimal_phases_reach_the_gain_bound(rng):
    M = 64
    h = complex_gaussian(1.0, M, rng)
    arrival = _random_arrival(rng, M)
    alpha = 0.3 - 0.7j
    theta = optimal_phases(h, arrival)
    assert np.all((theta >= 0) & (theta < 2 * np.pi))
    bound = abs(alpha) * np.abs(h).sum() / M
    assert abs(passive_gain(theta, alpha, arrival, h)) == pytest.approx(
        bound, rel=1e-12)


def test_arbitrary_phases_stay_below_bound(rng):
    M = 32
    h = complex_gaussian(1.0, M, rng)
    arrival = _random_arrival(rng, M)
    bound = np.abs(h).sum() / M
    for _ in range(50):
        theta = rng.uniform(0, 2 * np.pi, M)
        assert abs(passive_gain(theta, 1.0, arrival, h)) <= bound * (1 + 1e-12)


def test_common_phase_offset_keeps_gain_magnitude(rng):
    M = 16
    h = complex_gaussian(1.0, M, rng)
    arrival = _random_arrival(rng, M)
    theta = rng.uniform(0, 2 * np.pi, M)
    base = abs(passive_gain(theta, 1.0, arrival, h))
    shifted = abs(passive_gain(np.mod(theta + 1.234, 2 * np.pi), 1.0, arrival,
                               h))
    assert shifted == pytest.approx(base, rel=1e-12)


def test_zero_channel_entries_get_zero_phase(rng):
    h = complex_gaussian(1.0, 6, rng)
    h[2] = 0
    theta = optimal_phases(h, _random_arrival(rng, 6))
    assert theta[2] == 0.0


def test_los_optimal_phases_follow_steering_difference(rng):
    rows, cols = 4, 5
    beta = complex(complex_gaussian(1.0, None, rng))
    azimuth, elevation = rng.uniform(-1.2, 1.2), rng.uniform(-0.5, 0.5)
    arrival_az, arrival_el = rng.uniform(-1.2, 1.2), rng.uniform(-0.5, 0.5)
    h = _los_channel(beta, azimuth, elevation, rows, cols)
    theta = optimal_phases(h, upa_response(arrival_az, arrival_el, rows, cols))

    m1 = np.repeat(np.arange(rows), cols)
    m2 = np.tile(np.arange(cols), rows)
    expected = np.angle(beta) + np.pi * (
        m1 * (np.cos(elevation) * np.sin(azimuth) -
              np.cos(arrival_el) * np.sin(arrival_az)) + m2 *
        (np.sin(elevation) - np.sin(arrival_el)))
    np.testing.assert_allclose(np.angle(np.exp(1j * (theta - expected))),
                               0.0,
                               atol=1e-9)


def test_max_gain_matrix_for_los_is_gain_product(rng):
    geometry = ArrayGeometry(bs_antennas=4, irs_rows=4, irs_cols=4)
    irs = [(0, -5, 0.3), (0, 5, 0.3)]
    users = [(5, -3, 0), (5, 7, 0)]
    bs_irs = [
        sample_bs_irs((30, 0, 0.3), p, LOS, rng, irs_normal=0.0) for p in irs
    ]
    irs_user = [[
        sample_irs_user(p, u, LOS, ChannelKind.LOS, rng, geometry)
        for u in users
    ] for p in irs]
    W = max_gain_matrix(bs_irs, irs_user)
    for l in range(2):
        for k in range(2):
            assert W[l, k] == pytest.approx(
                abs(bs_irs[l].gain) * abs(irs_user[l][k].los.gain))


def test_max_gain_of_zero_channel_is_zero():
    bs_irs = [RankOneChannel(gain=1 + 0j, aoa_azimuth=0, aoa_elevation=0,
                             aod_azimuth=0)]
    zero = IrsUserChannel(coefficients=np.zeros(4, dtype=complex),
                          kind=ChannelKind.RAYLEIGH,
                          variance=0.0)
    assert max_gain_matrix(bs_irs, [[zero]])[0, 0] == 0.0


def test_rayleigh_max_gain_converges_to_rayleigh_mean(rng):
    bs_irs = [RankOneChannel(gain=1 + 0j, aoa_azimuth=0, aoa_elevation=0,
                             aod_azimuth=0)]
    h = IrsUserChannel(coefficients=complex_gaussian(1.0, 10_000, rng),
                       kind=ChannelKind.RAYLEIGH,
                       variance=1.0)
    assert max_gain_matrix(bs_irs, [[h]])[0, 0] == pytest.approx(
        np.sqrt(np.pi) / 2, rel=0.02)


# ─────────────────────────────────────────────
# AIC
# ─────────────────────────────────────────────


def test_aic_closed_form_matches_direct_sum(rng):
    rows = cols = 8
    for _ in range(20):
        alpha = complex(complex_gaussian(1.0, None, rng))
        beta, beta_victim = complex_gaussian(1.0, 2, rng)
        serving = (rng.uniform(-1.3, 1.3), rng.uniform(-0.6, 0.6))
        victim = (rng.uniform(-1.3, 1.3), rng.uniform(-0.6, 0.6))
        arrival = upa_response(rng.uniform(-1.3, 1.3), rng.uniform(-0.6, 0.6),
                               rows, cols)
        theta = optimal_phases(_los_channel(beta, *serving, rows, cols),
                               arrival)
        direct = abs(
            passive_gain(theta, alpha, arrival,
                         _los_channel(beta_victim, *victim, rows, cols)))
        closed = aic_cross_gain_los(alpha, beta_victim, serving, victim, rows,
                                    cols)
        assert closed == pytest.approx(direct,
                                       rel=1e-10,
                                       abs=1e-12 * abs(alpha * beta_victim))


def test_aic_without_angular_separation_is_full_gain():
    value = aic_cross_gain_los(0.5j, 2.0, (0.3, 0.1), (0.3, 0.1), 10, 10)
    assert value == pytest.approx(1.0)


def test_aic_envelope_decays_with_surface_size(rng):
    for _ in range(20):
        serving = (rng.uniform(-1.3, 1.3), rng.uniform(-0.6, 0.6))
        victim = (rng.uniform(-1.3, 1.3), rng.uniform(-0.6, 0.6))
        delta = (np.cos(victim[1]) * np.sin(victim[0]) -
                 np.cos(serving[1]) * np.sin(serving[0]))
        gamma = np.sin(victim[1]) - np.sin(serving[1])
        for size in (4, 16, 64):
            value = aic_cross_gain_los(1.0, 1.0, serving, victim, size, size)
            envelope = 1.0 / (size * size * abs(
                np.sin(np.pi / 2 * delta) * np.sin(np.pi / 2 * gamma)))
            assert value <= envelope * (1 + 1e-12)


def test_los_off_assignment_gains_are_small_at_40x40():
    geometry = ArrayGeometry(bs_antennas=32, irs_rows=40, irs_cols=40)
    rng = np.random.default_rng(11)
    irs = (0.0, -5.0, 0.3)
    users = [(5.0, -8.0, 0.0), (5.0, 4.0, 0.0), (55.0, -2.0, 0.0),
             (55.0, 6.0, 0.0)]
    bs_irs = [sample_bs_irs((30, 0, 0.3), irs, LOS, rng, irs_normal=0.0)]
    irs_user = [[
        sample_irs_user(irs, u, LOS, ChannelKind.LOS, rng, geometry)
        for u in users
    ]]
    association = Association(assignment=(0, ), num_users=1)
    phases = apply_association(association, bs_irs, irs_user, geometry)
    W = realized_gain_matrix(bs_irs, irs_user, phases, geometry)
    W_max = max_gain_matrix(bs_irs, irs_user)
    assert abs(W[0, 0]) == pytest.approx(W_max[0, 0], rel=1e-12)
    for k in range(1, 4):
        assert abs(W[0, k]) < 0.1 * W_max[0, k]


def test_rayleigh_cross_gain_decays_like_inverse_sqrt_m():
    rng = np.random.default_rng(2020)
    ratios = [rayleigh_aic_ratio(m, 200, rng) for m in (100, 400, 1600)]
    assert ratios[0] > ratios[1] > ratios[2]
    for before, after in zip(ratios, ratios[1:]):
        assert 0.3 <= after / before <= 0.7


# ─────────────────────────────────────────────
# Association
# ─────────────────────────────────────────────


def test_exhaustive_hand_example():
    association, objective = associate_exhaustive(np.array([[1.0, 10.0],
                                                            [10.0, 1.0]]))
    assert association.assignment == (1, 0)
    assert objective == pytest.approx(0.02)


def test_exhaustive_single_pair():
    association, objective = associate_exhaustive(np.array([[2.0]]))
    assert association.assignment == (0, )
    assert objective == pytest.approx(0.25)


def test_exhaustive_matches_enumeration(rng):
    for _ in range(20):
        W = rng.uniform(0.1, 5.0, (5, 3))
        association, objective = associate_exhaustive(W)
        best = min(
            association_objective(W, a)
            for a in itertools.product(range(3), repeat=5))
        assert objective == pytest.approx(best)
        assert association_objective(W, association) == pytest.approx(best)


def test_exhaustive_tie_break_is_lexicographic():
    association, _ = associate_exhaustive(np.ones((2, 2)))
    assert association.assignment == (0, 1)
    association, _ = associate_exhaustive(np.ones((3, 2)))
    assert association.assignment == (0, 0, 1)


def test_exhaustive_refuses_large_searches():
    with pytest.raises(SearchLimitError, match="greedy"):
        associate_exhaustive(np.ones((12, 3)), limit=1000)


def test_association_needs_enough_irs():
    with pytest.raises(InfeasibleAssociationError):
        associate_exhaustive(np.ones((1, 2)))
    with pytest.raises(InfeasibleAssociationError):
        associate_greedy(np.ones((2, 3)))


def test_greedy_hand_traces():
    assert associate_greedy(np.array([[3.0, 1.0], [2.0,
                                                   5.0]])).assignment == (0, 1)
    W = np.array([[5.0, 4.0], [4.5, 1.0], [1.0, 4.4]])
    assert associate_greedy(W).assignment == (0, 0, 1)


def test_greedy_tie_break_prefers_smallest_indices():
    assert associate_greedy(np.ones((2, 2))).assignment == (0, 1)


def test_greedy_never_beats_exhaustive(rng):
    equal = 0
    for _ in range(1000):
        W = rng.uniform(0.0, 1.0, (6, 3))
        greedy = associate_greedy(W)
        _, best = associate_exhaustive(W)
        assert greedy.serves_all_users
        value = association_objective(W, greedy)
        assert value >= best * (1 - 1e-12)
        equal += value <= best * (1 + 1e-12)
    assert equal > 0


def test_association_objective_of_unserved_user_is_infinite():
    assert association_objective(np.ones((2, 2)), (0, 0)) == float("inf")


def test_apply_association_single_pair_matches_optimal_phases(rng):
    geometry = ArrayGeometry(bs_antennas=4, irs_rows=3, irs_cols=3)
    bs_irs = [sample_bs_irs((30, 0, 0.3), (0, 5, 0.3), LOS, rng)]
    irs_user = [[
        sample_irs_user((0, 5, 0.3), (5, 2, 0), LOS, ChannelKind.RAYLEIGH,
                        rng, geometry)
    ]]
    phases = apply_association(Association(assignment=(0, ), num_users=1),
                               bs_irs, irs_user, geometry)
    np.testing.assert_allclose(
        phases.phases[0],
        optimal_phases(irs_user[0][0],
                       irs_arrival_response(bs_irs[0], geometry)))


def test_realized_gains_hit_maximum_on_assigned_pairs(rng):
    geometry = ArrayGeometry(bs_antennas=4, irs_rows=4, irs_cols=4)
    irs = [(0, -5, 0.3), (0, 5, 0.3), (60, -3, 0.3)]
    normals = [0.0, 0.0, np.pi]
    users = [(5, -3, 0), (5, 7, 0)]
    bs_irs = [
        sample_bs_irs((30, 0, 0.3), p, LOS, rng, irs_normal=n)
        for p, n in zip(irs, normals)
    ]
    irs_user = [[
        sample_irs_user(p, u, LOS, ChannelKind.RAYLEIGH, rng, geometry)
        for u in users
    ] for p in irs]
    W_max = max_gain_matrix(bs_irs, irs_user)
    association = associate_greedy(W_max)
    phases = apply_association(association, bs_irs, irs_user, geometry)
    W = realized_gain_matrix(bs_irs, irs_user, phases, geometry)
    for l, k in enumerate(association.assignment):
        assert abs(W[l, k]) == pytest.approx(W_max[l, k], rel=1e-12)
    assert np.all(np.abs(W) <= W_max * (1 + 1e-12))


# ─────────────────────────────────────────────
# Theoretical SINR
# ─────────────────────────────────────────────


def test_theoretical_single_pair():
    value = theoretical_min_sinr(Association(assignment=(0, ), num_users=1),
                                 np.array([[2e-6]]), 1e-4, 32, 400, 1e-11)
    assert value == pytest.approx(1e-4 * 32 * 400**2 * 4e-12 / 1e-11)


def test_theoretical_symmetric_pair():
    g = 3e-6
    W = np.array([[g, 0.1 * g], [0.2 * g, g]])
    value = theoretical_min_sinr(Association(assignment=(0, 1), num_users=2),
                                 W, 1e-4, 16, 100, 1e-11)
    assert value == pytest.approx(1e-4 * 16 * 100**2 * g**2 / (2 * 1e-11))


def test_theoretical_rejects_unserved_user():
    with pytest.raises(InfeasibleAssociationError):
        theoretical_min_sinr(Association(assignment=(0, 0), num_users=2),
                             np.ones((2, 2)), 1.0, 4, 4, 1.0)
