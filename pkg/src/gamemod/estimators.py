"""Scikit-learn style front ends for the two relax-and-perturb solvers.

Both estimators are configured with hyperparameters in ``__init__`` (so they
compose with ``clone``, ``get_params`` and friends), learn the target profile
from ``y`` in ``fit``, and turn original reward tables into modified ones in
``transform``.  All randomness is derived from ``random_state``, so repeated
fits and transforms are bit-for-bit reproducible.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .errors import ShapeError
from .modify import rap
from .markov import rap_mg
from .types import (
    CostSpec,
    ForeverCost,
    MarkovGame,
    MarkovPolicy,
    MatrixGame,
    ModificationRequest,
    OneTimeCost,
    StrategyProfile,
)
from .validation import check_payoff_matrix

__all__ = ["GameModifier", "MarkovGameModifier"]


def _as_cost(cost) -> CostSpec:
    if isinstance(cost, (OneTimeCost, ForeverCost)):
        return cost
    if cost == "l1":
        return OneTimeCost()
    if cost == "forever":
        return ForeverCost()
    raise ShapeError(f"cost must be 'l1', 'forever' or a CostSpec, got {cost!r}")


def _as_profile(y, shape: tuple[int, int]) -> StrategyProfile:
    if isinstance(y, StrategyProfile):
        profile = y
    else:
        p, q = y
        profile = StrategyProfile(p, q)
    if profile.shape != shape:
        raise ShapeError(f"target shape {profile.shape} does not match game shape {shape}")
    return profile


class GameModifier(BaseEstimator):
    """Install a target profile as the unique equilibrium of a matrix game.

    Parameters
    ----------
    value_range : pair of float or None
        Closed interval the modified game's value must fall in; ``None``
        endpoints are unbounded.
    bound : float or None
        Modified payoffs must stay in ``[-bound, bound]``; ``None`` disables
        the constraint.
    cost : {'l1', 'forever'} or CostSpec
        'l1' charges the plain L1 distance between reward tables; 'forever'
        weights each entry by the target play probability p_i * q_j.
    margin_sow : float
        Strictness margin installed on off-support (switch-out) inequalities.
    margin_reward : float
        Headroom kept inside a finite bound, and the half-width of the random
        invertibility perturbation.
    random_state : int
        Seed for the perturbation draws.

    Attributes
    ----------
    result_ : ModificationResult
    modified_payoff_ : ndarray of shape (n_row_actions, n_col_actions)
    value_ : float
    cost_ : float
    certificate_ : UniquenessCertificate
    """

    def __init__(
        self,
        value_range=(None, None),
        bound=None,
        cost="l1",
        margin_sow=0.01,
        margin_reward=0.01,
        random_state=0,
    ):
        self.value_range = value_range
        self.bound = bound
        self.cost = cost
        self.margin_sow = margin_sow
        self.margin_reward = margin_reward
        self.random_state = random_state

    def _request(self, target) -> ModificationRequest:
        return ModificationRequest(
            target=target,
            value_range=tuple(self.value_range),
            bound=self.bound,
            cost=_as_cost(self.cost),
            margin_sow=self.margin_sow,
            margin_reward=self.margin_reward,
            seed=self.random_state,
        )

    def fit(self, X, y):
        """Solve the modification problem for payoff matrix ``X`` and target ``y``.

        ``y`` is the target profile: a ``StrategyProfile`` or a ``(p, q)`` pair.
        """
        R = check_payoff_matrix(X)
        self.target_ = _as_profile(y, R.shape)
        self.result_ = rap(MatrixGame(R, bound=self.bound), self._request(self.target_))
        self.modified_payoff_ = self.result_.modified.payoff
        self.value_ = self.result_.value
        self.cost_ = self.result_.cost
        self.certificate_ = self.result_.certificate
        return self

    def transform(self, X):
        """Modify payoff matrix ``X`` so the fitted target is its unique equilibrium."""
        if not hasattr(self, "target_"):
            raise ShapeError("GameModifier.transform called before fit")
        R = check_payoff_matrix(X)
        if R.shape != self.target_.shape:
            raise ShapeError(f"X has shape {R.shape}, fitted target expects {self.target_.shape}")
        return rap(MatrixGame(R, bound=self.bound), self._request(self.target_)).modified.payoff

    def fit_transform(self, X, y):
        return self.fit(X, y).modified_payoff_


class MarkovGameModifier(BaseEstimator):
    """Install a target Markov policy as the unique Markov-perfect equilibrium.

    Takes a :class:`~gamemod.types.MarkovGame` as ``X`` and a
    :class:`~gamemod.types.MarkovPolicy` (or ``(p, q)`` array pair of shapes
    ``(H, S, A1)`` / ``(H, S, A2)``) as ``y``.  Parameters match
    :class:`GameModifier`; the value range constrains the overall value under
    the initial state distribution.

    Attributes
    ----------
    result_ : MarkovModificationResult
    modified_rewards_ : ndarray of shape (H, S, A1, A2)
    value_ : float
    stage_values_ : ndarray of shape (H, S)
    cost_ : float
    verification_ : MpeVerification
    """

    def __init__(
        self,
        value_range=(None, None),
        bound=None,
        cost="l1",
        margin_sow=0.01,
        margin_reward=0.01,
        random_state=0,
    ):
        self.value_range = value_range
        self.bound = bound
        self.cost = cost
        self.margin_sow = margin_sow
        self.margin_reward = margin_reward
        self.random_state = random_state

    def _request(self, target) -> ModificationRequest:
        return ModificationRequest(
            target=target,
            value_range=tuple(self.value_range),
            bound=self.bound,
            cost=_as_cost(self.cost),
            margin_sow=self.margin_sow,
            margin_reward=self.margin_reward,
            seed=self.random_state,
        )

    @staticmethod
    def _as_policy(y) -> MarkovPolicy:
        if isinstance(y, MarkovPolicy):
            return y
        p, q = y
        return MarkovPolicy(np.asarray(p), np.asarray(q))

    def fit(self, X, y):
        if not isinstance(X, MarkovGame):
            raise ShapeError("MarkovGameModifier expects a MarkovGame as X")
        self.target_ = self._as_policy(y)
        self.result_ = rap_mg(X, self._request(self.target_))
        self.modified_rewards_ = self.result_.modified.rewards
        self.value_ = self.result_.value
        self.stage_values_ = self.result_.stage_values
        self.cost_ = self.result_.cost
        self.verification_ = self.result_.verification
        return self

    def transform(self, X):
        """Modify the rewards of ``X`` so the fitted policy is its unique MPE."""
        if not hasattr(self, "target_"):
            raise ShapeError("MarkovGameModifier.transform called before fit")
        if not isinstance(X, MarkovGame):
            raise ShapeError("MarkovGameModifier expects a MarkovGame as X")
        return rap_mg(X, self._request(self.target_)).modified.rewards

    def fit_transform(self, X, y):
        return self.fit(X, y).modified_rewards_
