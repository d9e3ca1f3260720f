"""A small linear-programming layer over scipy's HiGHS backend.

The model is deliberately minimal: bounded variables, sparse linear rows with
<= / = / >= senses, and a minimized linear objective.  Construction order of
variables and rows is preserved, which together with the deterministic HiGHS
solver makes repeated solves of the same model bit-identical.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
from scipy.optimize import linprog

from .errors import InvalidCost, NumericalFailure

#: Returned solutions satisfy every constraint to within this tolerance.
FEASIBILITY_TOL = 1e-8

_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-9,
    "dual_feasibility_tolerance": 1e-9,
}


class LpStatus(enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpSolution:
    status: LpStatus
    x: np.ndarray | None
    objective: float | None
    iterations: int

    def value(self, var: int) -> float:
        return float(self.x[var])

    def values(self, vars: np.ndarray) -> np.ndarray:
        return self.x[np.asarray(vars, dtype=int)]


class LpModel:
    """Incrementally built LP, solved by :func:`solve_lp`."""

    def __init__(self):
        self._lb: list[float] = []
        self._ub: list[float] = []
        self._names: dict[int, str] = {}
        self._obj: dict[int, float] = {}
        # per row: (column indices, coefficients, sense, rhs)
        self._rows: list[tuple[np.ndarray, np.ndarray, str, float]] = []

    @property
    def n_vars(self) -> int:
        return len(self._lb)

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    def add_var(self, lb: float = -np.inf, ub: float = np.inf, name: str | None = None) -> int:
        if lb > ub:
            raise InvalidCost(f"variable bounds are crossed: [{lb}, {ub}]")
        self._lb.append(lb)
        self._ub.append(ub)
        idx = len(self._lb) - 1
        if name is not None:
            self._names[idx] = name
        return idx

    def add_vars(self, count: int, lb: float = -np.inf, ub: float = np.inf) -> np.ndarray:
        start = len(self._lb)
        self._lb.extend([lb] * count)
        self._ub.extend([ub] * count)
        return np.arange(start, start + count)

    def add_row(self, cols, coefs, sense: str, rhs: float) -> None:
        if sense not in ("<=", "=", ">="):
            raise InvalidCost(f"unknown constraint sense {sense!r}")
        cols = np.asarray(cols, dtype=int)
        coefs = np.asarray(coefs, dtype=float)
        if cols.shape != coefs.shape:
            raise InvalidCost("constraint columns and coefficients differ in length")
        if cols.size and (cols.min() < 0 or cols.max() >= self.n_vars):
            raise InvalidCost("constraint references an undeclared variable")
        self._rows.append((cols, coefs, sense, float(rhs)))

    def add_objective_term(self, var: int, coef: float) -> None:
        self._obj[var] = self._obj.get(var, 0.0) + float(coef)

    def name_of(self, var: int) -> str:
        return self._names.get(var, f"x{var}")

    def to_lp_text(self) -> str:
        """Dump the model in CPLEX LP text format (debugging aid)."""
        lines = ["Minimize", " obj: " + _expr_text(self._obj, self.name_of)]
        lines.append("Subject To")
        for k, (cols, coefs, sense, rhs) in enumerate(self._rows):
            op = {"<=": "<=", "=": "=", ">=": ">="}[sense]
            lines.append(f" c{k}: " + _expr_text(dict(zip(cols.tolist(), coefs.tolist())), self.name_of) + f" {op} {rhs}")
        lines.append("Bounds")
        for i, (lb, ub) in enumerate(zip(self._lb, self._ub)):
            lines.append(f" {_bound_text(lb)} <= {self.name_of(i)} <= {_bound_text(ub)}")
        lines.append("End")
        return "\n".join(lines) + "\n"

    def _assemble(self):
        n = self.n_vars
        c = np.zeros(n)
        for var, coef in self._obj.items():
            c[var] = coef
        ub_rows, eq_rows = [], []
        ub_rhs, eq_rhs = [], []
        for cols, coefs, sense, rhs in self._rows:
            if sense == "=":
                eq_rows.append((cols, coefs))
                eq_rhs.append(rhs)
            elif sense == "<=":
                ub_rows.append((cols, coefs))
                ub_rhs.append(rhs)
            else:  # >= : negate into <=
                ub_rows.append((cols, -coefs))
                ub_rhs.append(-rhs)

        def stack(rows):
            if not rows:
                return None
            indptr = np.zeros(len(rows) + 1, dtype=int)
            indptr[1:] = np.cumsum([r[0].size for r in rows])
            indices = np.concatenate([r[0] for r in rows]) if indptr[-1] else np.zeros(0, dtype=int)
            data = np.concatenate([r[1] for r in rows]) if indptr[-1] else np.zeros(0)
            return sp.csr_matrix((data, indices, indptr), shape=(len(rows), n))

        bounds = np.column_stack([self._lb, self._ub]) if n else np.zeros((0, 2))
        return (
            c,
            stack(ub_rows),
            np.asarray(ub_rhs) if ub_rhs else None,
            stack(eq_rows),
            np.asarray(eq_rhs) if eq_rhs else None,
            bounds,
        )


def _expr_text(terms: dict[int, float], name_of) -> str:
    if not terms:
        return "0"
    parts = []
    for var in sorted(terms):
        coef = terms[var]
        sign = "-" if coef < 0 else "+"
        parts.append(f"{sign} {abs(coef)} {name_of(var)}")
    text = " ".join(parts)
    return text[2:] if text.startswith("+ ") else text


def _bound_text(b: float) -> str:
    if b == np.inf:
        return "+inf"
    if b == -np.inf:
        return "-inf"
    return str(b)


def solve_lp(model: LpModel) -> LpSolution:
    """Solve the model, returning an optimal basic solution when one exists.

    Raises :class:`NumericalFailure` on solver breakdown or when the returned
    point violates :data:`FEASIBILITY_TOL`.
    """
    c, A_ub, b_ub, A_eq, b_eq, bounds = model._assemble()
    res = linprog(
        c,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options=dict(_HIGHS_OPTIONS),
    )
    if res.status == 2:
        return LpSolution(LpStatus.INFEASIBLE, None, None, 0)
    if res.status == 3:
        return LpSolution(LpStatus.UNBOUNDED, None, None, 0)
    if res.status != 0:
        raise NumericalFailure(f"LP solver breakdown (status {res.status}): {res.message}")

    x = np.asarray(res.x, dtype=float)
    _check_feasible(x, A_ub, b_ub, A_eq, b_eq, bounds)
    iterations = int(np.sum(res.nit)) if np.ndim(res.nit) else int(res.nit)
    return LpSolution(LpStatus.OPTIMAL, x, float(res.fun), iterations)


def _check_feasible(x, A_ub, b_ub, A_eq, b_eq, bounds) -> None:
    worst = 0.0
    if A_ub is not None:
        worst = max(worst, float(np.max(A_ub @ x - b_ub, initial=0.0)))
    if A_eq is not None:
        worst = max(worst, float(np.max(np.abs(A_eq @ x - b_eq), initial=0.0)))
    if bounds.size:
        worst = max(worst, float(np.max(bounds[:, 0] - x, initial=0.0)))
        worst = max(worst, float(np.max(x - bounds[:, 1], initial=0.0)))
    if worst > FEASIBILITY_TOL:
        raise NumericalFailure(f"LP solution violates feasibility by {worst:.3e} > {FEASIBILITY_TOL}")


def encode_abs_cost(model: LpModel, pairs) -> list[int | None]:
    """Add sum_k w_k * |x_k - c_k| to the objective via auxiliary variables.

    ``pairs`` is an iterable of (variable, constant, weight).  Each positive
    weight introduces one variable t >= |x - c| through the two standard
    inequalities; zero-weight pairs contribute nothing and are skipped.
    Returns the auxiliary variable per pair (None where skipped).
    """
    handles: list[int | None] = []
    for var, const, weight in pairs:
        if not np.isfinite(weight) or weight < 0:
            raise InvalidCost(f"negative or non-finite cost weight {weight!r}")
        if weight == 0.0:
            handles.append(None)
            continue
        t = model.add_var(lb=0.0)
        model.add_row([var, t], [1.0, -1.0], "<=", const)     # x - t <= c
        model.add_row([var, t], [-1.0, -1.0], "<=", -const)   # -x - t <= -c
        model.add_objective_term(t, weight)
        handles.append(t)
    return handles
