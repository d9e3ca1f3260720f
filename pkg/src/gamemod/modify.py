"""Normal-form game modification: feasibility check, relaxed LP, relax-and-perturb."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .erps import build_erps
from .errors import CertificationFailure, InfeasibleRequest, ShapeError, SolverFailure
from .lp import LpModel, LpSolution, LpStatus, encode_abs_cost, solve_lp
from .types import (
    MatrixGame,
    ModificationRequest,
    StrategyProfile,
    cost_weights,
    expected_payoff,
    modification_cost,
)
from .uniqueness import DEFAULT_INV_TOL, DEFAULT_SII_TOL, UniquenessCertificate, verify_unique_ne
from .validation import open_closed_intersects

__all__ = [
    "FeasibilityReport",
    "SolverStats",
    "ModificationResult",
    "RelaxedProgram",
    "check_feasibility_normal",
    "build_relaxed_program",
    "rap",
]

MAX_REDRAWS = 16


@dataclass(frozen=True)
class FeasibilityReport:
    """Outcome of the solvability pre-check, with named violations.

    ``feasible`` is the exact characterization (equal support sizes and the
    open payoff-value interval meeting the requested range).  ``margin_ok``
    additionally checks the tighter interval shrunk by both margins, which is
    what the relaxed program needs; a failed margin check usually surfaces
    later as an infeasible LP.
    """

    feasible: bool
    margin_ok: bool
    reasons: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "margin_ok": self.margin_ok,
            "reasons": list(self.reasons),
            "notes": list(self.notes),
        }


def _margin_interval(bound: float | None, margin_sow: float, margin_reward: float):
    if bound is None:
        return None, None
    return -bound + margin_reward + margin_sow, bound - margin_reward - margin_sow


def check_feasibility_normal(request: ModificationRequest, dims: tuple[int, int]) -> FeasibilityReport:
    """Exact feasibility of installing ``request.target`` on a game of shape ``dims``.

    Feasible iff the target's supports have equal size and (-b, b) intersects
    the requested value range.
    """
    target = request.target
    if not isinstance(target, StrategyProfile):
        raise ShapeError("normal-form feasibility requires a StrategyProfile target")
    if target.shape != tuple(dims):
        raise ShapeError(f"target shape {target.shape} does not match game shape {tuple(dims)}")

    reasons = []
    notes = []
    if not target.supports_equal:
        reasons.append(
            f"support sizes differ: |I|={target.row_support.size}, |J|={target.col_support.size}"
        )
    lo, hi = request.value_range
    b = request.bound
    open_lo = None if b is None else -b
    open_hi = None if b is None else b
    if not open_closed_intersects(open_lo, open_hi, lo, hi):
        reasons.append(f"value range [{lo}, {hi}] misses the attainable open interval ({open_lo}, {open_hi})")

    mlo, mhi = _margin_interval(b, request.margin_sow, request.margin_reward)
    margin_ok = open_closed_intersects(mlo, mhi, lo, hi)
    # Sign-flipped reading of the lower endpoint; recorded when it changes the answer.
    flipped = open_closed_intersects(mlo, mhi, None if lo is None else -lo, hi)
    if flipped != margin_ok:
        notes.append(
            "margin precondition differs between the [v_lo, v_hi] and [-v_lo, v_hi] readings; "
            "the [v_lo, v_hi] reading is used"
        )
    if not margin_ok:
        notes.append(
            f"margins (sow={request.margin_sow}, reward={request.margin_reward}) leave no attainable value "
            f"inside [{lo}, {hi}]"
        )
    return FeasibilityReport(
        feasible=not reasons,
        margin_ok=margin_ok,
        reasons=tuple(reasons),
        notes=tuple(notes),
    )


@dataclass
class RelaxedProgram:
    """The relaxed LP together with the variable layout needed to read it back."""

    model: LpModel
    payoff_vars: np.ndarray  # shape (m, n), variable ids
    value_var: int

    def extract(self, solution: LpSolution) -> tuple[np.ndarray, float]:
        flat = solution.values(self.payoff_vars.ravel())
        return flat.reshape(self.payoff_vars.shape), solution.value(self.value_var)


def build_relaxed_program(original: MatrixGame, request: ModificationRequest) -> RelaxedProgram:
    """The margin-tightened linear relaxation of the modification problem.

    Variables are every payoff entry plus the game value v.  On-support rows
    and columns are pinned to v exactly; off-support rows (columns) are forced
    at least ``margin_sow`` below (above) v; payoffs keep ``margin_reward``
    headroom inside a finite bound; the value is constrained to the requested
    range; the objective is the requested cost, linearized entrywise.
    """
    target = request.target
    if not isinstance(target, StrategyProfile):
        raise ShapeError("normal-form modification requires a StrategyProfile target")
    R0 = original.payoff
    m, n = R0.shape
    if target.shape != (m, n):
        raise ShapeError(f"target shape {target.shape} does not match game shape {(m, n)}")

    report = check_feasibility_normal(request, (m, n))
    if not report.feasible:
        raise InfeasibleRequest("; ".join(report.reasons), report=report)

    p, q = target.p, target.q
    I, J = target.row_support, target.col_support
    iota = request.margin_sow
    b = request.bound

    model = LpModel()
    if b is None:
        r_vars = model.add_vars(m * n)
    else:
        r_vars = model.add_vars(m * n, lb=-b + request.margin_reward, ub=b - request.margin_reward)
    r_vars = r_vars.reshape(m, n)
    v_var = model.add_var()

    out_rows = np.setdiff1d(np.arange(m), I, assume_unique=True)
    out_cols = np.setdiff1d(np.arange(n), J, assume_unique=True)

    for i in I:
        model.add_row(np.append(r_vars[i, J], v_var), np.append(q[J], -1.0), "=", 0.0)
    for j in J:
        model.add_row(np.append(r_vars[I, j], v_var), np.append(p[I], -1.0), "=", 0.0)
    for i in out_rows:
        model.add_row(np.append(r_vars[i, J], v_var), np.append(q[J], -1.0), "<=", -iota)
    for j in out_cols:
        model.add_row(np.append(r_vars[I, j], v_var), np.append(p[I], -1.0), ">=", iota)

    lo, hi = request.value_range
    if lo is not None:
        model.add_row([v_var], [1.0], ">=", lo)
    if hi is not None:
        model.add_row([v_var], [1.0], "<=", hi)

    weights = cost_weights(request.cost, target, (m, n))
    encode_abs_cost(
        model,
        zip(r_vars.ravel().tolist(), R0.ravel().tolist(), weights.ravel().tolist()),
    )
    return RelaxedProgram(model=model, payoff_vars=r_vars, value_var=v_var)


@dataclass(frozen=True)
class SolverStats:
    lp_iterations: int
    redraws: int
    seconds: float

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {"lp_iterations": self.lp_iterations, "redraws": self.redraws}
        if include_timing:
            d["seconds"] = self.seconds
        return d


@dataclass(frozen=True)
class ModificationResult:
    """A modified game, its certificate, and how much the change cost."""

    modified: MatrixGame
    value: float
    cost: float
    cost_relaxed: float
    certificate: UniquenessCertificate
    relaxed_payoff: np.ndarray
    epsilon: float
    stats: SolverStats


def rap(
    original: MatrixGame,
    request: ModificationRequest,
    *,
    sii_tol: float = DEFAULT_SII_TOL,
    inv_tol: float = DEFAULT_INV_TOL,
    max_redraws: int = MAX_REDRAWS,
) -> ModificationResult:
    """Relax-and-perturb: solve the relaxed LP, then add a random multiple of
    the extended rock-paper-scissors matrix to restore invertibility.

    The perturbation leaves every on-support payoff identity (and hence the
    achieved value) untouched; draws that fail certification are redone, which
    is a measure-zero event for sane margins.
    """
    t0 = time.perf_counter()
    target = request.target
    program = build_relaxed_program(original, request)
    solution = solve_lp(program.model)
    if solution.status is LpStatus.INFEASIBLE:
        report = check_feasibility_normal(request, original.shape)
        raise InfeasibleRequest(
            "relaxed program is infeasible; margins may be too large for the requested value range",
            report=report,
        )
    if solution.status is not LpStatus.OPTIMAL:
        raise SolverFailure(f"relaxed program returned {solution.status}")

    relaxed, _ = program.extract(solution)
    perturbation = build_erps(target, original.shape)
    rng = np.random.default_rng(request.seed)
    lam = request.margin_reward

    redraws = 0
    certificate = None
    modified_payoff = None
    epsilon = 0.0
    for _ in range(max_redraws):
        epsilon = float(rng.uniform(-lam, lam))
        while epsilon == 0.0:
            epsilon = float(rng.uniform(-lam, lam))
        modified_payoff = relaxed + epsilon * perturbation.matrix
        certificate = verify_unique_ne(modified_payoff, target, sii_tol=sii_tol, inv_tol=inv_tol)
        if certificate.valid:
            break
        redraws += 1
    else:
        raise CertificationFailure(
            f"no valid certificate after {max_redraws} perturbation draws "
            f"(last sigma_min={certificate.sigma_min:.3e})"
        )

    modified = MatrixGame(modified_payoff, bound=request.bound)
    stats = SolverStats(
        lp_iterations=solution.iterations,
        redraws=redraws,
        seconds=time.perf_counter() - t0,
    )
    return ModificationResult(
        modified=modified,
        value=expected_payoff(modified, target),
        cost=modification_cost(request.cost, target, modified_payoff, original.payoff),
        cost_relaxed=modification_cost(request.cost, target, relaxed, original.payoff),
        certificate=certificate,
        relaxed_payoff=relaxed,
        epsilon=epsilon,
        stats=stats,
    )
