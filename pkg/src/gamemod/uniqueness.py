"""Certificates and oracles for "is (p, q) the unique equilibrium of R".

Two independent routes are provided:

* :func:`verify_unique_ne` checks the switch-in-indifferent / switch-out-worse
  equalities and gaps plus invertibility of the bordered support block, which
  together are equivalent to uniqueness of the equilibrium.
* :func:`enumerate_nash` exhaustively finds all equilibria of a small game by
  support enumeration plus vertex enumeration of the optimal LP faces, without
  using any of the certificate logic.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionTooLarge, ShapeError, SolverFailure
from .lp import LpModel, LpStatus, solve_lp
from .types import MatrixGame, StrategyProfile, expected_payoff

__all__ = [
    "SiisowReport",
    "UniquenessCertificate",
    "ZeroSumSolution",
    "check_siisow",
    "check_inv",
    "verify_unique_ne",
    "solve_zero_sum",
    "enumerate_nash",
]

DEFAULT_SII_TOL = 1e-7
DEFAULT_INV_TOL = 1e-9


@dataclass(frozen=True)
class SiisowReport:
    """Raw switch-in residuals and switch-out gaps; no thresholding applied.

    Gaps are +inf when the corresponding support covers every action.
    """

    game_value: float
    row_sii_residual: float
    col_sii_residual: float
    row_sow_gap: float
    col_sow_gap: float


@dataclass(frozen=True)
class UniquenessCertificate:
    game_value: float
    row_sii_residual: float
    col_sii_residual: float
    row_sow_gap: float
    col_sow_gap: float
    sigma_min: float
    supports_equal: bool
    sii_tol: float
    inv_tol: float

    @property
    def valid(self) -> bool:
        return (
            self.supports_equal
            and self.row_sii_residual <= self.sii_tol
            and self.col_sii_residual <= self.sii_tol
            and self.row_sow_gap > 0.0
            and self.col_sow_gap > 0.0
            and self.sigma_min > self.inv_tol
        )

    def to_dict(self) -> dict:
        # Infinite gaps (full-support targets) serialize as null: "Infinity"
        # is not valid JSON.
        def num(x: float):
            return x if np.isfinite(x) else None

        return {
            "game_value": self.game_value,
            "row_sii_residual": self.row_sii_residual,
            "col_sii_residual": self.col_sii_residual,
            "row_sow_gap": num(self.row_sow_gap),
            "col_sow_gap": num(self.col_sow_gap),
            "sigma_min": self.sigma_min,
            "supports_equal": self.supports_equal,
            "sii_tol": self.sii_tol,
            "inv_tol": self.inv_tol,
            "valid": self.valid,
        }


def _matrix_of(game: MatrixGame | np.ndarray) -> np.ndarray:
    return game.payoff if isinstance(game, MatrixGame) else np.asarray(game, dtype=float)


def check_siisow(game: MatrixGame | np.ndarray, profile: StrategyProfile) -> SiisowReport:
    """Measure how far ``profile`` is from switch-in-indifferent / switch-out-worse on ``game``."""
    R = _matrix_of(game)
    if R.shape != profile.shape:
        raise ShapeError(f"game shape {R.shape} does not match profile shape {profile.shape}")
    p, q = profile.p, profile.q
    I, J = profile.row_support, profile.col_support
    v = float(p @ R @ q)

    row_payoffs = R @ q       # e_i^T R q per row
    col_payoffs = p @ R       # p^T R e_j per column

    row_res = float(np.max(np.abs(row_payoffs[I] - v)))
    col_res = float(np.max(np.abs(col_payoffs[J] - v)))

    out_rows = np.setdiff1d(np.arange(R.shape[0]), I, assume_unique=True)
    out_cols = np.setdiff1d(np.arange(R.shape[1]), J, assume_unique=True)
    row_gap = float(np.min(v - row_payoffs[out_rows])) if out_rows.size else np.inf
    col_gap = float(np.min(col_payoffs[out_cols] - v)) if out_cols.size else np.inf
    return SiisowReport(v, row_res, col_res, row_gap, col_gap)


def bordered_support_matrix(R: np.ndarray, I: np.ndarray, J: np.ndarray) -> np.ndarray:
    """[[R_IJ, -1], [1^T, 0]] for equal-sized supports I and J."""
    k = I.size
    B = np.zeros((k + 1, k + 1))
    B[:k, :k] = R[np.ix_(I, J)]
    B[:k, k] = -1.0
    B[k, :k] = 1.0
    return B


def check_inv(game: MatrixGame | np.ndarray, profile: StrategyProfile) -> tuple[float, bool]:
    """Smallest singular value of the bordered support block, and |I| == |J|.

    Returns (0.0, False) when supports differ in size: the block cannot be
    square, so invertibility fails structurally.
    """
    R = _matrix_of(game)
    if R.shape != profile.shape:
        raise ShapeError(f"game shape {R.shape} does not match profile shape {profile.shape}")
    I, J = profile.row_support, profile.col_support
    if I.size != J.size:
        return 0.0, False
    B = bordered_support_matrix(R, I, J)
    sigma = np.linalg.svd(B, compute_uv=False)
    return float(sigma[-1]), True


def verify_unique_ne(
    game: MatrixGame | np.ndarray,
    profile: StrategyProfile,
    sii_tol: float = DEFAULT_SII_TOL,
    inv_tol: float = DEFAULT_INV_TOL,
) -> UniquenessCertificate:
    """Certificate that ``profile`` is the unique equilibrium of ``game``.

    VALID means: on-support payoffs match the game value within ``sii_tol``,
    both switch-out gaps are strictly positive, the supports have equal size,
    and the bordered support block has smallest singular value above
    ``inv_tol``.
    """
    sii = check_siisow(game, profile)
    sigma_min, supports_equal = check_inv(game, profile)
    return UniquenessCertificate(
        game_value=sii.game_value,
        row_sii_residual=sii.row_sii_residual,
        col_sii_residual=sii.col_sii_residual,
        row_sow_gap=sii.row_sow_gap,
        col_sow_gap=sii.col_sow_gap,
        sigma_min=sigma_min,
        supports_equal=supports_equal,
        sii_tol=sii_tol,
        inv_tol=inv_tol,
    )


@dataclass(frozen=True)
class ZeroSumSolution:
    value: float
    p: np.ndarray
    q: np.ndarray


def solve_zero_sum(game: MatrixGame | np.ndarray) -> ZeroSumSolution:
    """Game value and one optimal strategy per player, via the primal/dual LPs.

    Primal: max v s.t. p^T R >= v 1^T, p in the simplex.
    Dual:   min v s.t. R q <= v 1,    q in the simplex.
    """
    R = _matrix_of(game)
    m, n = R.shape

    primal = LpModel()
    p_vars = primal.add_vars(m, lb=0.0)
    v_var = primal.add_var()
    for j in range(n):
        primal.add_row(np.append(p_vars, v_var), np.append(-R[:, j], 1.0), "<=", 0.0)
    primal.add_row(p_vars, np.ones(m), "=", 1.0)
    primal.add_objective_term(v_var, -1.0)  # maximize v
    psol = solve_lp(primal)
    if psol.status is not LpStatus.OPTIMAL:
        raise SolverFailure(f"primal minimax LP returned {psol.status}")

    dual = LpModel()
    q_vars = dual.add_vars(n, lb=0.0)
    w_var = dual.add_var()
    for i in range(m):
        dual.add_row(np.append(q_vars, w_var), np.append(R[i, :], -1.0), "<=", 0.0)
    dual.add_row(q_vars, np.ones(n), "=", 1.0)
    dual.add_objective_term(w_var, 1.0)
    dsol = solve_lp(dual)
    if dsol.status is not LpStatus.OPTIMAL:
        raise SolverFailure(f"dual minimax LP returned {dsol.status}")

    v = psol.value(v_var)
    w = dsol.value(w_var)
    if abs(v - w) > 1e-6 * max(1.0, abs(v)):
        raise SolverFailure(f"primal/dual values disagree: {v} vs {w}")

    p = np.maximum(psol.values(p_vars), 0.0)
    q = np.maximum(dsol.values(q_vars), 0.0)
    return ZeroSumSolution(float(v), p / p.sum(), q / q.sum())


def _simplex_polytope_vertices(G: np.ndarray, rhs: float, tol: float) -> list[np.ndarray]:
    """Vertices of {x in simplex : G x >= rhs} by active-set enumeration.

    G has one row per linear constraint.  A vertex of the d-dimensional
    polytope has d-1 active constraints besides the simplex equality, so all
    (d-1)-subsets of {G rows} union {x_i = 0} are tried.
    """
    n_cons, d = G.shape
    rows = [(G[j], rhs) for j in range(n_cons)]
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        rows.append((e, 0.0))

    vertices: list[np.ndarray] = []
    for active in itertools.combinations(range(len(rows)), d - 1):
        A = np.ones((d, d))
        b = np.ones(d)
        for r, idx in enumerate(active):
            A[r + 1] = rows[idx][0]
            b[r + 1] = rows[idx][1]
        try:
            x = np.linalg.solve(A, b)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if np.min(x) < -tol or np.min(G @ x) < rhs - tol:
            continue
        if not any(np.max(np.abs(x - v)) <= tol for v in vertices):
            vertices.append(np.maximum(x, 0.0) / np.maximum(x, 0.0).sum())
    return vertices


def _weak_ne(R: np.ndarray, p: np.ndarray, q: np.ndarray, tol: float) -> bool:
    v = float(p @ R @ q)
    return float(np.max(R @ q)) <= v + tol and float(np.min(p @ R)) >= v - tol


def enumerate_nash(
    game: MatrixGame | np.ndarray,
    max_dim: int = 6,
    tol: float = 1e-7,
) -> list[tuple[StrategyProfile, float]]:
    """All equilibria of a small game, up to ``tol``-deduplication.

    Candidates come from (a) square support-pair linear systems and (b) vertex
    enumeration of the two optimal LP faces; every candidate is kept only if
    it passes the no-profitable-deviation check.  The game has a unique
    equilibrium exactly when one distinct profile survives.
    """
    R = _matrix_of(game)
    m, n = R.shape
    if max(m, n) > max_dim:
        raise DimensionTooLarge(f"enumerate_nash caps at {max_dim} actions per player, got {R.shape}")

    found: list[tuple[np.ndarray, np.ndarray]] = []

    def push(p: np.ndarray, q: np.ndarray) -> None:
        if not _weak_ne(R, p, q, tol):
            return
        for p0, q0 in found:
            if np.max(np.abs(p0 - p)) <= tol and np.max(np.abs(q0 - q)) <= tol:
                return
        found.append((p, q))

    # (a) equal-size support pairs: solve R_IJ q_J = v 1, sum q_J = 1 and the
    # transposed system for p_I; skip singular (degenerate) systems.
    e_last = None
    for k in range(1, min(m, n) + 1):
        e_last = np.zeros(k + 1)
        e_last[k] = 1.0
        for I in itertools.combinations(range(m), k):
            for J in itertools.combinations(range(n), k):
                I_arr = np.array(I)
                J_arr = np.array(J)
                B = bordered_support_matrix(R, I_arr, J_arr)
                try:
                    qv = np.linalg.solve(B, e_last)
                    pv = np.linalg.solve(bordered_support_matrix(R.T, J_arr, I_arr), e_last)
                except np.linalg.LinAlgError:
                    continue
                q_J, v_q = qv[:k], qv[k]
                p_I, v_p = pv[:k], pv[k]
                if abs(v_p - v_q) > 1e-6 * max(1.0, abs(v_q)):
                    continue
                if np.min(q_J) < -tol or np.min(p_I) < -tol:
                    continue
                p = np.zeros(m)
                q = np.zeros(n)
                p[I_arr] = np.maximum(p_I, 0.0)
                q[J_arr] = np.maximum(q_J, 0.0)
                push(p / p.sum(), q / q.sum())

    # (b) vertices of the optimal faces of the minimax LPs.  The equilibrium
    # set is the product of these faces, so non-uniqueness always shows up as
    # at least two vertices on one side.
    sol = solve_zero_sum(R)
    p_vertices = _simplex_polytope_vertices(R.T, sol.value, tol)    # p^T R >= v per column
    q_vertices = _simplex_polytope_vertices(-R, -sol.value, tol)    # R q <= v per row
    for p in p_vertices:
        for q in q_vertices:
            push(p, q)

    return [
        (StrategyProfile(p, q), expected_payoff(R, StrategyProfile(p, q)))
        for p, q in found
    ]
