import numpy as np
import pytest
from sklearn.base import clone

from gamemod.errors import ShapeError
from gamemod.estimators import GameModifier, MarkovGameModifier
from gamemod.generate import generate_random_markov
from gamemod.types import StrategyProfile
from gamemod.uniqueness import verify_unique_ne

MORRA = np.array([[2.0, -3.0], [-3.0, 4.0]])
MORRA_TARGET = ([7 / 12, 5 / 12], [7 / 12, 5 / 12])


def test_fit_exposes_solution_attributes():
    est = GameModifier(value_range=(0.0, 0.0), margin_sow=1e-4, margin_reward=1e-4)
    est.fit(MORRA, MORRA_TARGET)
    assert est.certificate_.valid
    assert est.value_ == pytest.approx(0.0, abs=1e-9)
    assert est.cost_ <= 0.42
    assert est.modified_payoff_.shape == (2, 2)


def test_fit_transform_returns_modified_payoff():
    est = GameModifier(value_range=(0.0, 0.0))
    out = est.fit_transform(MORRA, MORRA_TARGET)
    assert np.array_equal(out, est.modified_payoff_)


def test_transform_applies_fitted_target_to_new_game():
    est = GameModifier().fit(MORRA, MORRA_TARGET)
    other = np.array([[1.0, 0.0], [0.0, 1.0]])
    out = est.transform(other)
    cert = verify_unique_ne(out, StrategyProfile(*MORRA_TARGET))
    assert cert.valid


def test_transform_before_fit_raises():
    with pytest.raises(ShapeError):
        GameModifier().transform(MORRA)


def test_transform_rejects_wrong_shape():
    est = GameModifier().fit(MORRA, MORRA_TARGET)
    with pytest.raises(ShapeError):
        est.transform(np.zeros((3, 3)))


def test_get_params_round_trip_and_clone():
    est = GameModifier(value_range=(-1.0, 1.0), bound=2.0, cost="forever", random_state=5)
    params = est.get_params()
    assert params["bound"] == 2.0
    assert params["cost"] == "forever"
    cloned = clone(est)
    assert cloned.get_params() == params


def test_same_random_state_is_reproducible():
    a = GameModifier(random_state=3).fit(MORRA, MORRA_TARGET)
    b = GameModifier(random_state=3).fit(MORRA, MORRA_TARGET)
    assert np.array_equal(a.modified_payoff_, b.modified_payoff_)
    c = GameModifier(random_state=4).fit(MORRA, MORRA_TARGET)
    assert not np.array_equal(a.modified_payoff_, c.modified_payoff_)


def test_invalid_cost_name_rejected():
    with pytest.raises(ShapeError):
        GameModifier(cost="l2").fit(MORRA, MORRA_TARGET)


def test_markov_estimator_fit_and_attributes():
    game, policy = generate_random_markov(S=2, A=2, H=3, seed=0)
    est = MarkovGameModifier(value_range=(-0.5, 0.5), random_state=1)
    est.fit(game, policy)
    assert est.verification_.valid
    assert -0.5 - 1e-9 <= est.value_ <= 0.5 + 1e-9
    assert est.modified_rewards_.shape == game.rewards.shape
    assert est.stage_values_.shape == (3, 2)


def test_markov_estimator_accepts_array_pair_target():
    game, policy = generate_random_markov(S=2, A=2, H=2, seed=2)
    est = MarkovGameModifier().fit(game, (policy.p, policy.q))
    assert est.verification_.valid


def test_markov_estimator_rejects_non_markov_input():
    with pytest.raises(ShapeError):
        MarkovGameModifier().fit(MORRA, MORRA_TARGET)
