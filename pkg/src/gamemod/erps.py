"""Extended rock-paper-scissors construction.

For any target profile with equal support sizes, builds a payoff matrix with
entries in [-1, 1] whose unique equilibrium is exactly that profile, at game
value 0.  Used both as the feasibility witness and as the direction of the
random perturbation in the relax-and-perturb solvers.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import ShapeError, UnequalSupports
from .types import StrategyProfile
from .validation import readonly

__all__ = ["ErpsGame", "build_erps"]

#: Support probabilities below this trigger a conditioning warning: the
#: 1/(p_i q_j) entries stay inside [-1, 1] regardless, but downstream linear
#: algebra on the support block degrades.
CONDITIONING_WARN_PROB = 1e-6


@dataclass(frozen=True)
class ErpsGame:
    """The constructed matrix plus the bookkeeping of its construction."""

    matrix: np.ndarray
    normalizer_c: float
    support_size_k: int
    row_perm: np.ndarray
    col_perm: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", readonly(self.matrix))
        object.__setattr__(self, "row_perm", readonly(self.row_perm).astype(int))
        object.__setattr__(self, "col_perm", readonly(self.col_perm).astype(int))


def build_erps(profile: StrategyProfile, dims: tuple[int, int] | None = None) -> ErpsGame:
    """Build the extended rock-paper-scissors game for ``profile``.

    Supports are relabeled onto {0..k-1} in ascending order, the cyclic
    construction is applied there, and the inverse relabeling restores the
    original action indices.  Raises :class:`UnequalSupports` when the two
    supports differ in size.
    """
    m, n = profile.shape
    if dims is not None and tuple(dims) != (m, n):
        raise ShapeError(f"profile has shape {(m, n)} but dims {tuple(dims)} were requested")

    I = profile.row_support
    J = profile.col_support
    k = I.size
    if k != J.size:
        raise UnequalSupports(f"support sizes differ: |I|={k}, |J|={J.size}")

    # Order-preserving relabeling: sorted support first, then the rest.
    row_perm = np.concatenate([I, np.setdiff1d(np.arange(m), I, assume_unique=True)])
    col_perm = np.concatenate([J, np.setdiff1d(np.arange(n), J, assume_unique=True)])
    ps = profile.p[row_perm[:k]]
    qs = profile.q[col_perm[:k]]

    if min(ps.min(), qs.min()) < CONDITIONING_WARN_PROB:
        warnings.warn(
            "target profile has support probabilities below "
            f"{CONDITIONING_WARN_PROB:g}; the support block is ill conditioned",
            RuntimeWarning,
            stacklevel=2,
        )

    c = float(min(min(ps[i] * qs[(i + 1) % k], ps[i] * qs[(i + 2) % k]) for i in range(k)))

    M = np.zeros((m, n))
    M[:k, k:] = 1.0
    M[k:, :k] = -1.0
    if k > 1:
        for i in range(k):
            j1 = (i + 1) % k
            j2 = (i + 2) % k
            M[i, j1] = -c / (ps[i] * qs[j1])
            # For k == 2 this lands on the diagonal (j2 == i).
            M[i, j2] += c / (ps[i] * qs[j2])
    np.clip(M, -1.0, 1.0, out=M)

    out = np.empty((m, n))
    out[np.ix_(row_perm, col_perm)] = M
    return ErpsGame(matrix=out, normalizer_c=c, support_size_k=k, row_perm=row_perm, col_perm=col_perm)
