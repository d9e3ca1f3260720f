"""Seeded random instance generation for tests and benchmarks."""
from __future__ import annotations

import numpy as np

from .errors import ShapeError
from .types import MarkovGame, MarkovPolicy, MatrixGame, StrategyProfile

__all__ = [
    "random_equal_support_profile",
    "generate_random_normal",
    "generate_random_markov",
    "derive_rng",
]


def derive_rng(seed: int, *path: int) -> np.random.Generator:
    """An independent generator for (seed, grid point, instance index, ...).

    Instances keep their streams however the surrounding loop is parallelized
    or reordered.
    """
    return np.random.default_rng(np.random.SeedSequence([int(seed), *map(int, path)]))


def _support_size(m: int, kind: str) -> int:
    if kind == "pure":
        return 1
    if kind == "half":
        return max(1, m // 2)
    if kind == "full":
        return m
    raise ShapeError(f"support kind must be 'pure', 'half' or 'full', got {kind!r}")


def _dirichlet_on_support(rng: np.random.Generator, size: int, k: int) -> np.ndarray:
    v = np.zeros(size)
    idx = rng.choice(size, size=k, replace=False)
    v[np.sort(idx)] = rng.dirichlet(np.ones(k))
    return v


def random_equal_support_profile(
    rng: np.random.Generator, m: int, n: int, k: int
) -> StrategyProfile:
    """Dirichlet(1,..,1) strategies on independently chosen supports of size k."""
    if not (1 <= k <= min(m, n)):
        raise ShapeError(f"support size {k} out of range for dims ({m}, {n})")
    return StrategyProfile(_dirichlet_on_support(rng, m, k), _dirichlet_on_support(rng, n, k))


def generate_random_normal(
    m: int, support_kind: str, seed: int
) -> tuple[MatrixGame, StrategyProfile]:
    """A uniform[-1,1]^(m x m) game plus a random target of the requested support size."""
    rng = np.random.default_rng(seed) if isinstance(seed, int) else seed
    payoff = rng.uniform(-1.0, 1.0, size=(m, m))
    profile = random_equal_support_profile(rng, m, m, _support_size(m, support_kind))
    return MatrixGame(payoff), profile


def generate_random_markov(
    S: int, A: int, H: int, seed: int
) -> tuple[MarkovGame, MarkovPolicy]:
    """Uniform rewards, Dirichlet transitions per (h, s, i, j), full-support
    Dirichlet stage targets, uniform initial distribution."""
    rng = np.random.default_rng(seed) if isinstance(seed, int) else seed
    rewards = rng.uniform(-1.0, 1.0, size=(H, S, A, A))
    transitions = rng.dirichlet(np.ones(S), size=(max(H - 1, 0), S, A, A))
    initial = np.full(S, 1.0 / S)
    p = rng.dirichlet(np.ones(A), size=(H, S))
    q = rng.dirichlet(np.ones(A), size=(H, S))
    return MarkovGame(rewards, transitions, initial), MarkovPolicy(p, q)
