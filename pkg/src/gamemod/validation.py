"""Input validation helpers shared by the estimators, the CLI and the core types.

Unbounded quantities (payoff bound, value-range endpoints) are represented by
``None`` rather than by infinite floats, so interval arithmetic is always done
explicitly on finite numbers.
"""
from __future__ import annotations

import numpy as np

from .errors import InvalidStrategy, ShapeError

#: Probabilities at or below this are treated as exactly zero when computing
#: supports; keeps 1/(p_i q_j) terms and support-restricted LPs well conditioned.
SUPPORT_EPSILON = 1e-12

#: Largest deviation of a probability vector's sum from 1 that is silently
#: renormalized away.  Larger deviations are rejected as malformed input.
PROB_SUM_TOL = 1e-9


def readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


def check_payoff_matrix(X, *, bound: float | None = None, bound_slack: float = 1e-9) -> np.ndarray:
    """Coerce ``X`` to a read-only 2-D float array of finite payoffs."""
    R = np.asarray(X, dtype=float)
    if R.ndim != 2 or R.shape[0] < 1 or R.shape[1] < 1:
        raise ShapeError(f"payoff matrix must be 2-D and non-empty, got shape {R.shape}")
    if not np.all(np.isfinite(R)):
        raise ShapeError("payoff matrix has non-finite entries")
    if bound is not None:
        if not (bound > 0 and np.isfinite(bound)):
            raise ShapeError(f"bound must be a positive finite number or None, got {bound}")
        if np.any(np.abs(R) > bound + bound_slack):
            raise ShapeError(f"payoff entries exceed the bound {bound}")
    return readonly(R)


def check_probability_vector(v, *, name: str = "probability vector") -> np.ndarray:
    """Validate, canonicalize and freeze a mixed strategy.

    Entries at or below :data:`SUPPORT_EPSILON` are zeroed so that supports,
    cost weights and LP constraints all agree on which actions are played.
    """
    p = np.asarray(v, dtype=float).ravel()
    if p.size < 1:
        raise InvalidStrategy(f"{name} is empty")
    if not np.all(np.isfinite(p)):
        raise InvalidStrategy(f"{name} has non-finite entries")
    if np.any(p < -SUPPORT_EPSILON):
        raise InvalidStrategy(f"{name} has negative entries")
    p = np.maximum(p, 0.0)
    total = p.sum()
    if abs(total - 1.0) > PROB_SUM_TOL:
        raise InvalidStrategy(f"{name} sums to {total!r}, not 1")
    p = p / total
    p[p <= SUPPORT_EPSILON] = 0.0
    total = p.sum()
    if total <= 0.0:
        raise InvalidStrategy(f"{name} has empty support")
    return readonly(p / total)


def support(v) -> np.ndarray:
    """Indices of actions played with probability above :data:`SUPPORT_EPSILON`."""
    idx = np.flatnonzero(np.asarray(v, dtype=float) > SUPPORT_EPSILON)
    if idx.size == 0:
        raise InvalidStrategy("strategy has empty support")
    return idx


def open_closed_intersects(
    open_lo: float | None,
    open_hi: float | None,
    closed_lo: float | None,
    closed_hi: float | None,
) -> bool:
    """Whether the open interval (open_lo, open_hi) meets [closed_lo, closed_hi].

    ``None`` endpoints stand for the corresponding infinity.
    """
    lo = -np.inf if open_lo is None else open_lo
    hi = np.inf if open_hi is None else open_hi
    clo = -np.inf if closed_lo is None else closed_lo
    chi = np.inf if closed_hi is None else closed_hi
    if lo >= hi or clo > chi:
        return False
    return clo < hi and chi > lo
