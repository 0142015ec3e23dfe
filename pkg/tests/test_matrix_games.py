import itertools
import math

import numpy as np
import pytest

import specgames as sg
from specgames.errors import DegenerateGameError, NoPureNashError, OracleScaleError

FIG_PAYOFFS = {
    (0, 1): (2.12, 3.22),  # (Concentrate, Spread)
    (0, 0): (3.46, 3.46),
    (1, 1): (2.83, 2.42),
    (1, 0): (3.59, 2.12),
}


def test_two_channel_game_payoffs(two_channel_game):
    for profile, expected in FIG_PAYOFFS.items():
        got = two_channel_game.payoff_vector(profile)
        assert got == pytest.approx(expected, abs=0.01)
    # exact values from the defining formulas
    assert two_channel_game.utility(0, (0, 1)) == pytest.approx(
        math.log2(1.0 + 10.0 / (1.0 + 0.4 * 5.0)), abs=1e-12
    )
    assert two_channel_game.utility(0, (0, 0)) == pytest.approx(math.log2(11.0), abs=1e-12)


def test_two_channel_game_zero_cross():
    game = sg.build_power_game_2x2(cross_12=(0.0, 0.0), cross_21=(0.0, 0.0))
    for player in range(2):
        u = game.payoffs[..., player]
        # payoffs independent of the opponent's action
        if player == 0:
            assert np.allclose(u[:, 0], u[:, 1], atol=1e-12)
        else:
            assert np.allclose(u[0, :], u[1, :], atol=1e-12)


def test_two_channel_game_symmetric_cross():
    game = sg.build_power_game_2x2(cross_12=(0.4, 0.4), cross_21=(0.4, 0.4))
    for a, b in itertools.product(range(2), range(2)):
        assert game.utility(0, (a, b)) == pytest.approx(game.utility(1, (b, a)), abs=1e-12)


def test_contention_game_matrix(contention):
    assert contention.payoff_vector((0, 1)) == pytest.approx((7.0, 2.0))
    assert contention.payoff_vector((1, 1)) == pytest.approx((6.0, 6.0))
    assert contention.payoff_vector((0, 0)) == pytest.approx((0.0, 0.0))
    assert contention.payoff_vector((1, 0)) == pytest.approx((2.0, 7.0))
    for a, b in itertools.product(range(2), range(2)):
        assert contention.utility(0, (a, b)) == contention.utility(1, (b, a))


def test_best_response(contention):
    assert sg.best_response(contention, 0, (0,)) == [1]  # vs Aggress -> Backoff
    assert sg.best_response(contention, 0, (1,)) == [0]  # vs Backoff -> Aggress
    flat = sg.NormalFormGame(np.ones((2, 2, 2)))
    assert sg.best_response(flat, 0, (0,)) == [0, 1]


def test_strictly_dominant(two_channel_game, contention):
    assert sg.strictly_dominant_action(two_channel_game, 0) == 1  # Spread
    assert sg.strictly_dominant_action(two_channel_game, 1) is None
    assert sg.strictly_dominant_action(contention, 0) is None
    assert sg.strictly_dominant_action(contention, 1) is None
    one_action = sg.NormalFormGame(np.zeros((1, 2, 2)))
    assert sg.strictly_dominant_action(one_action, 0) == 0


def test_pure_nash(two_channel_game, contention):
    assert sg.pure_nash(two_channel_game) == [(1, 1)]
    assert two_channel_game.payoff_vector((1, 1)) == pytest.approx((2.83, 2.42), abs=0.005)
    assert sg.pure_nash(contention) == [(0, 1), (1, 0)]
    decoupled = sg.build_power_game_2x2(cross_12=(0.0, 0.0), cross_21=(0.0, 0.0))
    spots = sg.pure_nash(decoupled)
    # each user simply plays its dominant action; Spread maximizes own rate
    assert (1, 1) in spots


def test_best_response_dynamics(two_channel_game, contention):
    assert sg.best_response_dynamics(two_channel_game, (0, 0)) == (1, 1)
    assert sg.best_response_dynamics(contention, (0, 0)) in {(0, 1), (1, 0)}
    cycle = sg.NormalFormGame(
        np.array([[[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]]])
    )  # matching pennies has no pure NE
    with pytest.raises(NoPureNashError):
        sg.best_response_dynamics(cycle, (0, 0))


def test_mixed_nash_contention(contention):
    s1, s2, utilities = sg.mixed_nash_2x2(contention)
    assert s1.probs[0] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert s2.probs[0] == pytest.approx(1.0 / 3.0, abs=1e-12)
    assert utilities == pytest.approx([14.0 / 3.0, 14.0 / 3.0], abs=1e-12)
    # exact indifference between own actions at the equilibrium mix
    a = contention.payoffs[..., 0]
    u_rows = a @ s2.probs
    assert abs(u_rows[0] - u_rows[1]) <= 1e-12


def test_mixed_nash_matching_pennies():
    pennies = sg.NormalFormGame(
        np.array([[[1.0, -1.0], [-1.0, 1.0]], [[-1.0, 1.0], [1.0, -1.0]]])
    )
    s1, s2, utilities = sg.mixed_nash_2x2(pennies)
    assert s1.probs == pytest.approx([0.5, 0.5], abs=1e-12)
    assert s2.probs == pytest.approx([0.5, 0.5], abs=1e-12)
    assert utilities == pytest.approx([0.0, 0.0], abs=1e-12)


def test_mixed_nash_degenerate(two_channel_game):
    with pytest.raises(DegenerateGameError):
        sg.mixed_nash_2x2(two_channel_game)


def test_stackelberg_finite(two_channel_game, contention):
    profile, utilities = sg.stackelberg_finite(two_channel_game, 0)
    assert profile == (0, 0)  # (Concentrate, Concentrate)
    assert utilities == pytest.approx((3.46, 3.46), abs=0.005)
    profile, utilities = sg.stackelberg_finite(contention, 0)
    assert profile == (0, 1)
    assert utilities == pytest.approx((7.0, 2.0))
    decoupled = sg.build_power_game_2x2(cross_12=(0.0, 0.0), cross_21=(0.0, 0.0))
    profile, _ = sg.stackelberg_finite(decoupled, 0)
    assert profile in sg.pure_nash(decoupled)


def test_stackelberg_leader_beats_pure_nash():
    for idx in range(25):
        rng = np.random.default_rng([91, idx])
        game = sg.NormalFormGame(rng.normal(size=(3, 3, 2)))
        nash = sg.pure_nash(game)
        _, utilities = sg.stackelberg_finite(game, 0)
        for profile in nash:
            if len(sg.best_response(game, 1, (profile[0],))) == 1:
                assert utilities[0] >= game.utility(0, profile) - 1e-12


def test_ce_uniform_over_three(contention):
    dist = sg.JointDistribution.from_flat([0.0, 1 / 3, 1 / 3, 1 / 3], (2, 2))
    ok, violation = sg.is_correlated_equilibrium(contention, dist, tol=1e-9)
    assert ok and violation == 0.0
    assert dist.expected_utilities(contention) == pytest.approx([5.0, 5.0], abs=1e-12)


def test_ce_pure_nash_point_mass(contention, two_channel_game):
    for game in (contention, two_channel_game):
        for profile in sg.pure_nash(game):
            probs = np.zeros(game.action_counts)
            probs[profile] = 1.0
            ok, violation = sg.is_correlated_equilibrium(game, sg.JointDistribution(probs), 1e-12)
            assert ok and violation <= 1e-12


def test_ce_backoff_backoff_fails(contention):
    dist = sg.JointDistribution.from_flat([0.0, 0.0, 0.0, 1.0], (2, 2))
    ok, violation = sg.is_correlated_equilibrium(contention, dist, tol=1e-9)
    assert not ok
    assert violation == pytest.approx(1.0, abs=1e-12)


def test_ce_convex_hull_of_equilibria(contention):
    # mixtures of NE point masses and the independent mixed NE stay in the CE set
    s1, s2, _ = sg.mixed_nash_2x2(contention)
    product = np.outer(s1.probs, s2.probs)
    corners = []
    for profile in sg.pure_nash(contention):
        mass = np.zeros((2, 2))
        mass[profile] = 1.0
        corners.append(mass)
    rng = np.random.default_rng(5)
    for _ in range(20):
        w = rng.dirichlet(np.ones(len(corners) + 1))
        mix = w[0] * product + sum(wi * c for wi, c in zip(w[1:], corners))
        ok, violation = sg.is_correlated_equilibrium(contention, sg.JointDistribution(mix), 1e-9)
        assert ok, violation


def test_optimize_ce_contention(contention):
    dist, value = sg.optimize_ce(contention, [1.0, 1.0])
    assert value == pytest.approx(10.5, abs=1e-9)
    assert dist.probs.reshape(-1) == pytest.approx([0.0, 0.25, 0.25, 0.5], abs=1e-9)
    ok, _ = sg.is_correlated_equilibrium(contention, dist, tol=1e-9)
    assert ok


def test_optimize_ce_single_weight(contention):
    dist, value = sg.optimize_ce(contention, [1.0, 0.0])
    assert value == pytest.approx(7.0, abs=1e-9)
    assert dist.probs[0, 1] == pytest.approx(1.0, abs=1e-9)


def test_optimize_ce_single_action_game():
    game = sg.NormalFormGame(np.array([[[2.0, 3.0]]]))
    dist, value = sg.optimize_ce(game, [1.0, 1.0])
    assert dist.probs.reshape(-1) == pytest.approx([1.0])
    assert value == pytest.approx(5.0, abs=1e-12)


def test_optimize_ce_beats_best_nash(contention):
    weights = np.array([1.0, 1.0])
    _, value = sg.optimize_ce(contention, weights)
    best_nash = max(float(weights @ contention.payoff_vector(p)) for p in sg.pure_nash(contention))
    s1, s2, mixed_utilities = sg.mixed_nash_2x2(contention)
    best_nash = max(best_nash, float(weights @ mixed_utilities))
    assert value >= best_nash - 1e-9


def test_optimize_ce_random_games_certified():
    for idx in range(15):
        rng = np.random.default_rng([77, idx])
        game = sg.NormalFormGame(rng.uniform(0.0, 5.0, size=(3, 2, 2)))
        dist, value = sg.optimize_ce(game, rng.uniform(0.0, 1.0, size=2) + 0.1)
        ok, violation = sg.is_correlated_equilibrium(game, dist, tol=1e-9)
        assert ok, violation


def test_optimize_ce_scale_cap():
    game = sg.NormalFormGame(np.zeros((9, 9, 2)))
    with pytest.raises(OracleScaleError):
        sg.optimize_ce(game)


def test_discretize_power_game(two_channel):
    game = sg.discretize_power_game(two_channel, levels=10)
    assert game.action_counts == (11, 11)
    # the all-in-own-channel profile reproduces the Concentrate/Concentrate cell
    c1 = game.action_labels[0].index("10-0")
    c2 = game.action_labels[1].index("0-10")
    assert game.payoff_vector((c1, c2)) == pytest.approx([math.log2(11.0)] * 2, abs=1e-12)


def test_joint_distribution_marginals(contention):
    dist = sg.JointDistribution.from_flat([0.1, 0.2, 0.3, 0.4], (2, 2))
    assert dist.marginal(0) == pytest.approx([0.3, 0.7])
    assert dist.marginal(1) == pytest.approx([0.4, 0.6])
    with pytest.raises(ValueError):
        sg.JointDistribution.from_flat([0.5, 0.2, 0.2, 0.2], (2, 2))
