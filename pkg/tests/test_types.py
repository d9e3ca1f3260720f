import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gamemod.errors import InvalidCost, InvalidStrategy, ShapeError
from gamemod.types import (
    ForeverCost,
    MarkovGame,
    MarkovPolicy,
    MatrixGame,
    ModificationRequest,
    OneTimeCost,
    StrategyProfile,
    cost_weights,
    expected_payoff,
    modification_cost,
    support,
)

MORRA = [[2.0, -3.0], [-3.0, 4.0]]
MORRA_MIX = [7 / 12, 5 / 12]


def test_matrix_game_accepts_plain_lists():
    game = MatrixGame([[1, 2], [3, 4]])
    assert game.shape == (2, 2)
    assert game.bound is None


def test_matrix_game_rejects_out_of_bound_entries():
    with pytest.raises(ShapeError):
        MatrixGame([[2.0, 0.0]], bound=1.0)


def test_matrix_game_rejects_nonfinite():
    with pytest.raises(ShapeError):
        MatrixGame([[np.inf, 0.0]])


def test_matrix_game_payoff_is_readonly():
    game = MatrixGame(MORRA)
    with pytest.raises(ValueError):
        game.payoff[0, 0] = 9.0


def test_profile_renormalizes_small_drift():
    drift = 1e-10
    prof = StrategyProfile([0.5 + drift, 0.5], [1.0, 0.0])
    assert prof.p.sum() == pytest.approx(1.0, abs=1e-15)


def test_profile_rejects_large_drift():
    with pytest.raises(InvalidStrategy):
        StrategyProfile([0.6, 0.6], [1.0, 0.0])


def test_profile_rejects_negative_entries():
    with pytest.raises(InvalidStrategy):
        StrategyProfile([1.1, -0.1], [1.0, 0.0])


def test_profile_zeroes_probabilities_below_support_epsilon():
    prof = StrategyProfile([1.0 - 1e-13, 1e-13], [1.0, 0.0])
    assert prof.p[1] == 0.0
    assert list(prof.row_support) == [0]


def test_support_examples():
    assert list(support([0.5, 0.5, 0.0])) == [0, 1]
    assert list(support([1.0, 0.0])) == [0]
    assert list(support(MORRA_MIX)) == [0, 1]


def test_support_empty_raises():
    with pytest.raises(InvalidStrategy):
        support([0.0, 0.0])


@given(st.permutations(list(range(5))), st.integers(1, 31))
def test_support_commutes_with_permutation(perm, mask):
    # mask picks a nonempty subset of indices to be positive
    v = np.array([0.2 if (mask >> i) & 1 else 0.0 for i in range(5)])
    v = v / v.sum()
    perm = np.array(perm)
    permuted = v[perm]
    expected = sorted(np.flatnonzero(permuted > 0).tolist())
    assert sorted(support(permuted).tolist()) == expected


def test_expected_payoff_morra():
    prof = StrategyProfile(MORRA_MIX, MORRA_MIX)
    assert expected_payoff(MatrixGame(MORRA), prof) == pytest.approx(-1 / 12, abs=1e-12)


def test_expected_payoff_zero_matrix():
    prof = StrategyProfile([0.3, 0.7], [0.5, 0.5])
    assert expected_payoff(MatrixGame([[0.0, 0.0], [0.0, 0.0]]), prof) == 0.0


def test_expected_payoff_water_game():
    prof = StrategyProfile([0.5, 0.5], [0.5, 0.5])
    assert expected_payoff(MatrixGame([[0.0, 1.0], [1.0, 0.0]]), prof) == pytest.approx(0.5)


def test_expected_payoff_shape_mismatch():
    with pytest.raises(ShapeError):
        expected_payoff(MatrixGame(MORRA), StrategyProfile([1.0], [1.0]))


@given(
    st.floats(0.1, 5.0),
    st.floats(-3.0, 3.0),
    st.integers(0, 2**31 - 1),
)
def test_expected_payoff_affine(alpha, beta, seed):
    rng = np.random.default_rng(seed)
    R = rng.uniform(-1, 1, size=(3, 4))
    prof = StrategyProfile(rng.dirichlet(np.ones(3)), rng.dirichlet(np.ones(4)))
    base = expected_payoff(R, prof)
    shifted = expected_payoff(alpha * R + beta, prof)
    assert shifted == pytest.approx(alpha * base + beta, abs=1e-9)


def test_cost_weights_l1_is_all_ones():
    prof = StrategyProfile([1.0, 0.0], [0.0, 1.0])
    assert np.array_equal(cost_weights(OneTimeCost(), prof, (2, 2)), np.ones((2, 2)))


def test_cost_weights_forever_is_outer_product():
    prof = StrategyProfile([0.25, 0.75], [0.5, 0.5])
    w = cost_weights(ForeverCost(), prof, (2, 2))
    assert np.allclose(w, np.outer(prof.p, prof.q))


def test_cost_weights_forever_override():
    prof = StrategyProfile([1.0, 0.0], [1.0, 0.0])
    override = np.array([[0.0, 2.0], [0.0, 0.0]])
    w = cost_weights(ForeverCost(weights=override), prof, (2, 2))
    assert np.array_equal(w, override)


def test_forever_cost_rejects_negative_weights():
    with pytest.raises(InvalidCost):
        ForeverCost(weights=np.array([[-1.0]]))


def test_modification_cost_l1():
    prof = StrategyProfile([1.0, 0.0], [1.0, 0.0])
    old = np.zeros((2, 2))
    new = np.array([[1.0, -2.0], [0.0, 0.5]])
    assert modification_cost(OneTimeCost(), prof, new, old) == pytest.approx(3.5)


def test_markov_game_shapes_and_invariants():
    H, S, A = 3, 2, 2
    rng = np.random.default_rng(0)
    rewards = rng.uniform(-1, 1, size=(H, S, A, A))
    transitions = rng.dirichlet(np.ones(S), size=(H - 1, S, A, A))
    game = MarkovGame(rewards, transitions, np.full(S, 0.5))
    assert game.horizon == H and game.n_states == S and game.action_shape == (A, A)
    assert game.stage_game(0, 1).shape == (A, A)


def test_markov_game_rejects_bad_transition_rows():
    rewards = np.zeros((2, 1, 2, 2))
    transitions = np.full((1, 1, 2, 2, 1), 0.5)  # rows sum to 0.5
    with pytest.raises(ShapeError):
        MarkovGame(rewards, transitions, [1.0])


def test_markov_game_horizon_one_needs_no_transitions():
    game = MarkovGame(np.zeros((1, 2, 2, 2)), np.zeros((0, 2, 2, 2, 2)), [0.5, 0.5])
    assert game.horizon == 1


def test_markov_policy_stage_access():
    rng = np.random.default_rng(1)
    policy = MarkovPolicy(rng.dirichlet(np.ones(3), size=(2, 2)), rng.dirichlet(np.ones(3), size=(2, 2)))
    stage = policy.stage(1, 0)
    assert isinstance(stage, StrategyProfile)
    assert stage.p.sum() == pytest.approx(1.0)


def test_request_rejects_empty_value_range():
    prof = StrategyProfile([1.0], [1.0])
    with pytest.raises(ShapeError):
        ModificationRequest(target=prof, value_range=(1.0, 0.0))


def test_request_rejects_nonpositive_margins():
    prof = StrategyProfile([1.0], [1.0])
    with pytest.raises(ShapeError):
        ModificationRequest(target=prof, margin_sow=0.0)
    with pytest.raises(ShapeError):
        ModificationRequest(target=prof, margin_reward=-1.0)
