"""Domain types: games, strategy profiles, policies, costs and requests.

All types are immutable after construction (arrays are stored read-only), so
instances can be shared freely across threads.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import InvalidCost, ShapeError
from .validation import (
    PROB_SUM_TOL,
    check_payoff_matrix,
    check_probability_vector,
    readonly,
    support,
)

__all__ = [
    "MatrixGame",
    "StrategyProfile",
    "MarkovGame",
    "MarkovPolicy",
    "OneTimeCost",
    "ForeverCost",
    "CostSpec",
    "ModificationRequest",
    "expected_payoff",
    "support",
]


@dataclass(frozen=True)
class MatrixGame:
    """A finite two-player zero-sum normal-form game.

    The row player maximizes ``payoff``; the column player minimizes it.
    ``bound=None`` means payoffs are unconstrained, otherwise every entry must
    lie in ``[-bound, bound]``.
    """

    payoff: np.ndarray
    bound: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "payoff", check_payoff_matrix(self.payoff, bound=self.bound))

    @property
    def shape(self) -> tuple[int, int]:
        return self.payoff.shape

    @property
    def n_rows(self) -> int:
        return self.payoff.shape[0]

    @property
    def n_cols(self) -> int:
        return self.payoff.shape[1]


@dataclass(frozen=True)
class StrategyProfile:
    """A pair of mixed strategies (p for the row player, q for the column player)."""

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "p", check_probability_vector(self.p, name="p"))
        object.__setattr__(self, "q", check_probability_vector(self.q, name="q"))

    @property
    def row_support(self) -> np.ndarray:
        return support(self.p)

    @property
    def col_support(self) -> np.ndarray:
        return support(self.q)

    @property
    def supports_equal(self) -> bool:
        return self.row_support.size == self.col_support.size

    @property
    def shape(self) -> tuple[int, int]:
        return self.p.size, self.q.size


def expected_payoff(game: MatrixGame | np.ndarray, profile: StrategyProfile) -> float:
    """Expected reward p^T R q to the row player under ``profile``."""
    R = game.payoff if isinstance(game, MatrixGame) else np.asarray(game, dtype=float)
    if R.shape != profile.shape:
        raise ShapeError(f"game shape {R.shape} does not match profile shape {profile.shape}")
    return float(profile.p @ R @ profile.q)


@dataclass(frozen=True)
class MarkovGame:
    """A finite-horizon two-player zero-sum Markov game.

    Shapes:
      rewards      (H, S, A1, A2)
      transitions  (H-1, S, A1, A2, S)  -- next-state distribution per joint action
      initial      (S,)                 -- distribution over the period-1 state
    """

    rewards: np.ndarray
    transitions: np.ndarray
    initial: np.ndarray
    bound: float | None = None

    def __post_init__(self):
        R = np.asarray(self.rewards, dtype=float)
        if R.ndim != 4:
            raise ShapeError(f"rewards must have shape (H, S, A1, A2), got {R.shape}")
        H, S, m, n = R.shape
        if min(H, S, m, n) < 1:
            raise ShapeError(f"rewards must be non-empty in every axis, got {R.shape}")
        if not np.all(np.isfinite(R)):
            raise ShapeError("rewards have non-finite entries")
        if self.bound is not None:
            if not (self.bound > 0 and np.isfinite(self.bound)):
                raise ShapeError(f"bound must be positive and finite or None, got {self.bound}")
            if np.any(np.abs(R) > self.bound + 1e-9):
                raise ShapeError(f"reward entries exceed the bound {self.bound}")

        P = np.asarray(self.transitions, dtype=float)
        if P.size == 0:
            P = P.reshape(0, S, m, n, S)
        if P.shape != (H - 1, S, m, n, S):
            raise ShapeError(
                f"transitions must have shape (H-1, S, A1, A2, S) = {(H - 1, S, m, n, S)}, got {P.shape}"
            )
        if P.size and (np.any(P < -1e-12) or np.any(np.abs(P.sum(axis=-1) - 1.0) > PROB_SUM_TOL)):
            raise ShapeError("each transition row must be a probability distribution")

        mu = np.asarray(self.initial, dtype=float).ravel()
        if mu.shape != (S,):
            raise ShapeError(f"initial distribution must have shape ({S},), got {mu.shape}")
        if np.any(mu < -1e-12) or abs(mu.sum() - 1.0) > PROB_SUM_TOL:
            raise ShapeError("initial state distribution must be a probability vector")

        object.__setattr__(self, "rewards", readonly(R))
        object.__setattr__(self, "transitions", readonly(np.maximum(P, 0.0)))
        object.__setattr__(self, "initial", readonly(np.maximum(mu, 0.0) / mu.sum()))

    @property
    def horizon(self) -> int:
        return self.rewards.shape[0]

    @property
    def n_states(self) -> int:
        return self.rewards.shape[1]

    @property
    def action_shape(self) -> tuple[int, int]:
        return self.rewards.shape[2], self.rewards.shape[3]

    def stage_game(self, h: int, s: int) -> MatrixGame:
        return MatrixGame(self.rewards[h, s], bound=self.bound)


@dataclass(frozen=True)
class MarkovPolicy:
    """A Markovian policy pair: per-period, per-state mixed strategies.

    Shapes: p (H, S, A1), q (H, S, A2).
    """

    p: np.ndarray
    q: np.ndarray

    def __post_init__(self):
        p = np.asarray(self.p, dtype=float)
        q = np.asarray(self.q, dtype=float)
        if p.ndim != 3 or q.ndim != 3 or p.shape[:2] != q.shape[:2]:
            raise ShapeError(f"policy arrays must be (H, S, A)-shaped with matching (H, S); got {p.shape}, {q.shape}")
        p = np.stack(
            [[check_probability_vector(p[h, s], name=f"p[{h},{s}]") for s in range(p.shape[1])] for h in range(p.shape[0])]
        )
        q = np.stack(
            [[check_probability_vector(q[h, s], name=f"q[{h},{s}]") for s in range(q.shape[1])] for h in range(q.shape[0])]
        )
        object.__setattr__(self, "p", readonly(p))
        object.__setattr__(self, "q", readonly(q))

    @property
    def horizon(self) -> int:
        return self.p.shape[0]

    @property
    def n_states(self) -> int:
        return self.p.shape[1]

    def stage(self, h: int, s: int) -> StrategyProfile:
        return StrategyProfile(self.p[h, s], self.q[h, s])


@dataclass(frozen=True)
class OneTimeCost:
    """Unweighted L1 distance between new and original reward tables."""


@dataclass(frozen=True)
class ForeverCost:
    """Target-play-weighted L1 distance.

    By default the weight on entry (i, j) is p_i * q_j (per stage for Markov
    games).  ``weights`` overrides the derived weights entrywise.
    """

    weights: np.ndarray | None = None

    def __post_init__(self):
        if self.weights is not None:
            w = np.asarray(self.weights, dtype=float)
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise InvalidCost("cost weights must be finite and nonnegative")
            object.__setattr__(self, "weights", readonly(w))


CostSpec = Union[OneTimeCost, ForeverCost]


def cost_weights(cost: CostSpec, target: StrategyProfile | MarkovPolicy, shape: tuple[int, ...]) -> np.ndarray:
    """Entrywise weights of the modification cost, one per reward entry."""
    if isinstance(cost, OneTimeCost):
        return np.ones(shape)
    if not isinstance(cost, ForeverCost):
        raise InvalidCost(f"unknown cost specification {cost!r}")
    if cost.weights is not None:
        w = np.asarray(cost.weights, dtype=float)
        if w.shape != tuple(shape):
            raise InvalidCost(f"cost weight override has shape {w.shape}, expected {tuple(shape)}")
        return w
    if isinstance(target, StrategyProfile):
        return np.outer(target.p, target.q)
    # Markov: per-stage outer products of the stage strategies.
    return np.einsum("hsi,hsj->hsij", target.p, target.q)


def modification_cost(
    cost: CostSpec,
    target: StrategyProfile | MarkovPolicy,
    new_rewards: np.ndarray,
    old_rewards: np.ndarray,
) -> float:
    """The loss l(R, R°) of replacing ``old_rewards`` with ``new_rewards``."""
    new = np.asarray(new_rewards, dtype=float)
    old = np.asarray(old_rewards, dtype=float)
    if new.shape != old.shape:
        raise ShapeError(f"reward tables differ in shape: {new.shape} vs {old.shape}")
    w = cost_weights(cost, target, new.shape)
    return float(np.sum(w * np.abs(new - old)))


@dataclass(frozen=True)
class ModificationRequest:
    """Everything the solver needs besides the original game.

    ``value_range`` endpoints and ``bound`` use ``None`` for the unbounded
    case.  ``margin_sow`` is the strictness margin installed on switch-out
    inequalities; ``margin_reward`` is both the headroom kept inside a finite
    reward bound and the half-width of the random perturbation.
    """

    target: StrategyProfile | MarkovPolicy
    value_range: tuple[float | None, float | None] = (None, None)
    bound: float | None = None
    cost: CostSpec = field(default_factory=OneTimeCost)
    margin_sow: float = 0.01
    margin_reward: float = 0.01
    seed: int = 0

    def __post_init__(self):
        lo, hi = self.value_range
        if lo is not None and hi is not None and lo > hi:
            raise ShapeError(f"empty value range [{lo}, {hi}]")
        if not (self.margin_sow > 0):
            raise ShapeError("margin_sow must be positive")
        if not (self.margin_reward > 0):
            raise ShapeError("margin_reward must be positive")
        if self.bound is not None and not (self.bound > 0 and np.isfinite(self.bound)):
            raise ShapeError(f"bound must be positive and finite or None, got {self.bound}")
