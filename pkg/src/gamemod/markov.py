"""Markov game modification: Bellman machinery, joint relaxed LP, RAP-MG."""
from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .erps import build_erps
from .errors import CertificationFailure, InfeasibleRequest, ShapeError, SolverFailure
from .lp import LpModel, LpSolution, LpStatus, encode_abs_cost, solve_lp
from .modify import FeasibilityReport, SolverStats, _margin_interval
from .types import MarkovGame, MarkovPolicy, ModificationRequest, cost_weights, modification_cost
from .uniqueness import (
    DEFAULT_INV_TOL,
    DEFAULT_SII_TOL,
    UniquenessCertificate,
    solve_zero_sum,
    verify_unique_ne,
)
from .validation import open_closed_intersects

__all__ = [
    "StageDecomposition",
    "MpeVerification",
    "MarkovModificationResult",
    "backward_induction",
    "verify_mpe_unique",
    "check_feasibility_markov",
    "build_relaxed_program_markov",
    "rap_mg",
]

MAX_STAGE_REDRAW_ROUNDS = 16


@dataclass(frozen=True)
class StageDecomposition:
    """Stage payoff matrices Q_h(s), minimax stage values, and the overall value.

    Bellman consistency: Q_h(s) = R_h(s) + sum_s' P_h(s'|s) v_{h+1}(s'), with
    the convention that values vanish beyond the horizon.
    """

    q_matrices: np.ndarray   # (H, S, A1, A2)
    stage_values: np.ndarray  # (H, S)
    value: float             # v_0 = sum_s P_0(s) v_1(s)


def backward_induction(game: MarkovGame) -> StageDecomposition:
    """Compute every stage game and its minimax value, last period first."""
    H, S = game.horizon, game.n_states
    m, n = game.action_shape
    Q = np.empty((H, S, m, n))
    v = np.zeros((H + 1, S))
    for h in range(H - 1, -1, -1):
        for s in range(S):
            Q[h, s] = game.rewards[h, s]
            if h < H - 1:
                Q[h, s] += game.transitions[h, s] @ v[h + 1]
            v[h, s] = solve_zero_sum(Q[h, s]).value
    return StageDecomposition(
        q_matrices=Q,
        stage_values=v[:H],
        value=float(game.initial @ v[0]),
    )


@dataclass(frozen=True)
class MpeVerification:
    """Per-stage uniqueness certificates against the recomputed stage games."""

    certificates: tuple[tuple[UniquenessCertificate, ...], ...]  # [h][s]
    stage_values: np.ndarray
    value: float

    @property
    def valid(self) -> bool:
        return all(cert.valid for row in self.certificates for cert in row)

    def failing_stages(self) -> list[tuple[int, int]]:
        return [
            (h, s)
            for h, row in enumerate(self.certificates)
            for s, cert in enumerate(row)
            if not cert.valid
        ]


def verify_mpe_unique(
    game: MarkovGame,
    policy: MarkovPolicy,
    sii_tol: float = DEFAULT_SII_TOL,
    inv_tol: float = DEFAULT_INV_TOL,
) -> MpeVerification:
    """Check that ``policy`` is the unique Markov-perfect equilibrium of ``game``.

    Recomputes every stage game by backward induction with fresh minimax
    solves (never trusting any modification LP's internal values) and runs the
    uniqueness certificate on each.
    """
    if (game.horizon, game.n_states) != (policy.horizon, policy.n_states):
        raise ShapeError(
            f"game is H={game.horizon}, S={game.n_states} but policy is "
            f"H={policy.horizon}, S={policy.n_states}"
        )
    if game.action_shape != (policy.p.shape[2], policy.q.shape[2]):
        raise ShapeError("policy action dimensions do not match the game")
    decomposition = backward_induction(game)
    certificates = tuple(
        tuple(
            verify_unique_ne(decomposition.q_matrices[h, s], policy.stage(h, s), sii_tol, inv_tol)
            for s in range(game.n_states)
        )
        for h in range(game.horizon)
    )
    return MpeVerification(
        certificates=certificates,
        stage_values=decomposition.stage_values,
        value=decomposition.value,
    )


def check_feasibility_markov(
    request: ModificationRequest,
    dims: tuple[int, int],
    horizon: int,
    n_states: int | None = None,
) -> FeasibilityReport:
    """Feasibility of the Markov modification: equal stage supports and
    (-H*b, H*b) meeting the value range."""
    policy = request.target
    if not isinstance(policy, MarkovPolicy):
        raise ShapeError("Markov feasibility requires a MarkovPolicy target")
    if policy.horizon != horizon:
        raise ShapeError(f"policy horizon {policy.horizon} does not match game horizon {horizon}")
    if n_states is not None and policy.n_states != n_states:
        raise ShapeError(f"policy has {policy.n_states} states, game has {n_states}")
    if (policy.p.shape[2], policy.q.shape[2]) != tuple(dims):
        raise ShapeError("policy action dimensions do not match the game")

    reasons = []
    notes = []
    for h in range(policy.horizon):
        for s in range(policy.n_states):
            stage = policy.stage(h, s)
            if not stage.supports_equal:
                reasons.append(
                    f"stage (h={h}, s={s}): support sizes differ "
                    f"(|I|={stage.row_support.size}, |J|={stage.col_support.size})"
                )

    lo, hi = request.value_range
    b = request.bound
    open_lo = None if b is None else -horizon * b
    open_hi = None if b is None else horizon * b
    if not open_closed_intersects(open_lo, open_hi, lo, hi):
        reasons.append(f"value range [{lo}, {hi}] misses the attainable open interval ({open_lo}, {open_hi})")

    # Margin precondition: per-stage margin interval against the per-stage
    # average value [v_lo/H, v_hi/H].
    mlo, mhi = _margin_interval(b, request.margin_sow, request.margin_reward)
    slo = None if lo is None else lo / horizon
    shi = None if hi is None else hi / horizon
    margin_ok = open_closed_intersects(mlo, mhi, slo, shi)
    flipped = open_closed_intersects(mlo, mhi, None if slo is None else -slo, shi)
    if flipped != margin_ok:
        notes.append(
            "margin precondition differs between the [v_lo/H, v_hi/H] and [-v_lo/H, v_hi/H] readings; "
            "the [v_lo/H, v_hi/H] reading is used"
        )
    if not margin_ok:
        notes.append(
            f"margins (sow={request.margin_sow}, reward={request.margin_reward}) leave no attainable "
            f"per-stage value inside [{slo}, {shi}]"
        )
    return FeasibilityReport(
        feasible=not reasons,
        margin_ok=margin_ok,
        reasons=tuple(reasons),
        notes=tuple(notes),
    )


@dataclass
class MarkovRelaxedProgram:
    model: LpModel
    reward_vars: np.ndarray  # (H, S, A1, A2)
    value_vars: np.ndarray   # (H, S)

    def extract(self, solution: LpSolution) -> tuple[np.ndarray, np.ndarray]:
        rewards = solution.values(self.reward_vars.ravel()).reshape(self.reward_vars.shape)
        values = solution.values(self.value_vars.ravel()).reshape(self.value_vars.shape)
        return rewards, values


def build_relaxed_program_markov(original: MarkovGame, request: ModificationRequest) -> MarkovRelaxedProgram:
    """Joint LP over all stages: per-stage switch-in/switch-out constraints on
    the stage matrices, Bellman coupling, value range on the initial value,
    reward-bound headroom, and the linearized cost over all reward entries.

    The final period's stage matrix is the final reward itself, so no separate
    stage variables are introduced there; with H = 1 and a single state the
    model coincides with the normal-form relaxation.
    """
    policy = request.target
    if not isinstance(policy, MarkovPolicy):
        raise ShapeError("Markov modification requires a MarkovPolicy target")
    H, S = original.horizon, original.n_states
    m, n = original.action_shape

    report = check_feasibility_markov(request, (m, n), H, S)
    if not report.feasible:
        raise InfeasibleRequest("; ".join(report.reasons[:4]), report=report)

    iota = request.margin_sow
    b = request.bound

    model = LpModel()
    if b is None:
        r_vars = model.add_vars(H * S * m * n)
    else:
        r_vars = model.add_vars(H * S * m * n, lb=-b + request.margin_reward, ub=b - request.margin_reward)
    r_vars = r_vars.reshape(H, S, m, n)
    # Stage-matrix variables only below the horizon; the last period reuses R.
    q_vars = model.add_vars((H - 1) * S * m * n).reshape(H - 1, S, m, n) if H > 1 else None
    v_vars = model.add_vars(H * S).reshape(H, S)

    def stage_matrix_vars(h: int, s: int) -> np.ndarray:
        return r_vars[h, s] if h == H - 1 else q_vars[h, s]

    for h in range(H):
        for s in range(S):
            stage = policy.stage(h, s)
            p, q = stage.p, stage.q
            I, J = stage.row_support, stage.col_support
            out_rows = np.setdiff1d(np.arange(m), I, assume_unique=True)
            out_cols = np.setdiff1d(np.arange(n), J, assume_unique=True)
            sv = stage_matrix_vars(h, s)
            vv = v_vars[h, s]
            for i in I:
                model.add_row(np.append(sv[i, J], vv), np.append(q[J], -1.0), "=", 0.0)
            for j in J:
                model.add_row(np.append(sv[I, j], vv), np.append(p[I], -1.0), "=", 0.0)
            for i in out_rows:
                model.add_row(np.append(sv[i, J], vv), np.append(q[J], -1.0), "<=", -iota)
            for j in out_cols:
                model.add_row(np.append(sv[I, j], vv), np.append(p[I], -1.0), ">=", iota)

    # Bellman coupling for periods before the horizon:
    # Q_h(s)_ij - R_h(s)_ij - sum_s' P_h(s'|s)_ij v_{h+1}(s') = 0.
    for h in range(H - 1):
        for s in range(S):
            for i in range(m):
                for j in range(n):
                    cols = np.concatenate(([q_vars[h, s, i, j], r_vars[h, s, i, j]], v_vars[h + 1]))
                    coefs = np.concatenate(([1.0, -1.0], -original.transitions[h, s, i, j]))
                    model.add_row(cols, coefs, "=", 0.0)

    lo, hi = request.value_range
    if lo is not None:
        model.add_row(v_vars[0], original.initial, ">=", lo)
    if hi is not None:
        model.add_row(v_vars[0], original.initial, "<=", hi)

    weights = cost_weights(request.cost, policy, (H, S, m, n))
    encode_abs_cost(
        model,
        zip(r_vars.ravel().tolist(), original.rewards.ravel().tolist(), weights.ravel().tolist()),
    )
    return MarkovRelaxedProgram(model=model, reward_vars=r_vars, value_vars=v_vars)


@dataclass(frozen=True)
class MarkovModificationResult:
    """Modified Markov game with per-stage certificates and recomputed values."""

    modified: MarkovGame
    value: float
    stage_values: np.ndarray
    cost: float
    cost_relaxed: float
    verification: MpeVerification
    relaxed_rewards: np.ndarray
    lp_stage_values: np.ndarray
    epsilons: np.ndarray
    stats: SolverStats

    @property
    def max_stage_value_gap(self) -> float:
        """Worst disagreement between LP stage values and freshly recomputed ones."""
        return float(np.max(np.abs(self.stage_values - self.lp_stage_values)))


def rap_mg(
    original: MarkovGame,
    request: ModificationRequest,
    *,
    sii_tol: float = DEFAULT_SII_TOL,
    inv_tol: float = DEFAULT_INV_TOL,
    max_redraw_rounds: int = MAX_STAGE_REDRAW_ROUNDS,
) -> MarkovModificationResult:
    """Relax-and-perturb for Markov games.

    Solves the joint relaxed LP, perturbs every stage reward independently by
    a random multiple of that stage's extended rock-paper-scissors matrix
    (draws in (h, s) lexicographic order for reproducibility), and verifies
    the result by full backward induction.  Stages whose certificate fails are
    re-perturbed individually; stage values are unchanged by re-perturbation,
    so repairs never invalidate other stages.
    """
    t0 = time.perf_counter()
    policy = request.target
    program = build_relaxed_program_markov(original, request)
    solution = solve_lp(program.model)
    if solution.status is LpStatus.INFEASIBLE:
        report = check_feasibility_markov(request, original.action_shape, original.horizon, original.n_states)
        raise InfeasibleRequest(
            "relaxed Markov program is infeasible; margins may be too large for the requested value range",
            report=report,
        )
    if solution.status is not LpStatus.OPTIMAL:
        raise SolverFailure(f"relaxed Markov program returned {solution.status}")

    relaxed, lp_values = program.extract(solution)
    H, S = original.horizon, original.n_states

    directions = np.empty_like(relaxed)
    for h in range(H):
        for s in range(S):
            directions[h, s] = build_erps(policy.stage(h, s)).matrix

    rng = np.random.default_rng(request.seed)
    lam = request.margin_reward

    def draw() -> float:
        eps = float(rng.uniform(-lam, lam))
        while eps == 0.0:
            eps = float(rng.uniform(-lam, lam))
        return eps

    epsilons = np.array([[draw() for _ in range(S)] for _ in range(H)])
    rewards = relaxed + epsilons[:, :, None, None] * directions
    verification = verify_mpe_unique(MarkovGame(rewards, original.transitions, original.initial), policy, sii_tol, inv_tol)

    redraws = 0
    rounds = 0
    while not verification.valid:
        rounds += 1
        if rounds > max_redraw_rounds:
            failing = verification.failing_stages()
            raise CertificationFailure(
                f"stages {failing} still fail certification after {max_redraw_rounds} redraw rounds"
            )
        for h, s in verification.failing_stages():
            epsilons[h, s] = draw()
            rewards[h, s] = relaxed[h, s] + epsilons[h, s] * directions[h, s]
            redraws += 1
        verification = verify_mpe_unique(
            MarkovGame(rewards, original.transitions, original.initial), policy, sii_tol, inv_tol
        )

    modified = MarkovGame(rewards, original.transitions, original.initial, bound=request.bound)
    stats = SolverStats(
        lp_iterations=solution.iterations,
        redraws=redraws,
        seconds=time.perf_counter() - t0,
    )
    return MarkovModificationResult(
        modified=modified,
        value=verification.value,
        stage_values=verification.stage_values,
        cost=modification_cost(request.cost, policy, rewards, original.rewards),
        cost_relaxed=modification_cost(request.cost, policy, relaxed, original.rewards),
        verification=verification,
        relaxed_rewards=relaxed,
        lp_stage_values=lp_values,
        epsilons=epsilons,
        stats=stats,
    )
