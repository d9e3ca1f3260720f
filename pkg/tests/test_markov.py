import numpy as np
import pytest

from gamemod.erps import build_erps
from gamemod.errors import InfeasibleRequest, ShapeError
from gamemod.generate import generate_random_markov
from gamemod.lp import solve_lp
from gamemod.markov import (
    backward_induction,
    build_relaxed_program_markov,
    check_feasibility_markov,
    rap_mg,
    verify_mpe_unique,
)
from gamemod.modify import build_relaxed_program, rap
from gamemod.types import (
    MarkovGame,
    MarkovPolicy,
    MatrixGame,
    ModificationRequest,
    StrategyProfile,
)

RPS = np.array([[0.0, -1.0, 1.0], [1.0, 0.0, -1.0], [-1.0, 1.0, 0.0]])


def wrap_normal(payoff) -> MarkovGame:
    """A horizon-1, single-state Markov game around a payoff matrix."""
    payoff = np.asarray(payoff, dtype=float)
    m, n = payoff.shape
    return MarkovGame(payoff[None, None], np.zeros((0, 1, m, n, 1)), [1.0])


def erps_built_game(rng, H, S, A, delta, v_star) -> tuple[MarkovGame, MarkovPolicy]:
    """Stage rewards delta * erps(stage target) + v*/H, arbitrary transitions.

    Every stage game is then an affine shift of an extended RPS matrix, so the
    policy is the unique equilibrium everywhere and stage values telescope to
    (H - h + 1) v* / H (with h counted from 1).
    """
    p = rng.dirichlet(np.ones(A), size=(H, S))
    q = rng.dirichlet(np.ones(A), size=(H, S))
    policy = MarkovPolicy(p, q)
    rewards = np.empty((H, S, A, A))
    for h in range(H):
        for s in range(S):
            rewards[h, s] = delta * build_erps(policy.stage(h, s)).matrix + v_star / H
    transitions = rng.dirichlet(np.ones(S), size=(H - 1, S, A, A))
    return MarkovGame(rewards, transitions, np.full(S, 1 / S)), policy


class TestBackwardInduction:
    def test_horizon_one_reduces_to_the_stage_matrix(self):
        game = wrap_normal([[2.0, -3.0], [-3.0, 4.0]])
        dec = backward_induction(game)
        assert np.array_equal(dec.q_matrices[0, 0], game.rewards[0, 0])
        assert dec.value == pytest.approx(-1 / 12, abs=1e-8)

    def test_zero_rewards_give_zero_values(self):
        rng = np.random.default_rng(0)
        game = MarkovGame(
            np.zeros((3, 2, 2, 2)),
            rng.dirichlet(np.ones(2), size=(2, 2, 2, 2)),
            [0.5, 0.5],
        )
        dec = backward_induction(game)
        assert np.max(np.abs(dec.stage_values)) <= 1e-9
        assert dec.value == pytest.approx(0.0, abs=1e-9)

    def test_erps_built_game_values_telescope(self):
        rng = np.random.default_rng(3)
        H, S, A = 3, 2, 3
        v_star = 0.3
        game, policy = erps_built_game(rng, H, S, A, delta=0.05, v_star=v_star)
        dec = backward_induction(game)
        for h in range(H):
            expected = (H - h) / H * v_star  # h is 0-indexed here
            assert dec.stage_values[h] == pytest.approx(expected, abs=1e-7)
        assert dec.value == pytest.approx(v_star, abs=1e-7)


class TestVerifyMpe:
    def test_horizon_one_rps_uniform_is_valid(self):
        game = wrap_normal(RPS)
        policy = MarkovPolicy(np.full((1, 1, 3), 1 / 3), np.full((1, 1, 3), 1 / 3))
        verification = verify_mpe_unique(game, policy)
        assert verification.valid
        assert verification.value == pytest.approx(0.0, abs=1e-9)

    def test_erps_built_game_is_valid_everywhere(self):
        rng = np.random.default_rng(11)
        game, policy = erps_built_game(rng, H=4, S=2, A=2, delta=0.1, v_star=-0.2)
        verification = verify_mpe_unique(game, policy)
        assert verification.valid
        assert verification.value == pytest.approx(-0.2, abs=1e-7)

    def test_unequal_stage_supports_invalidate_that_stage(self):
        game = wrap_normal(np.zeros((2, 2)))
        policy = MarkovPolicy(np.array([[[1.0, 0.0]]]), np.array([[[0.5, 0.5]]]))
        verification = verify_mpe_unique(game, policy)
        assert not verification.valid
        assert verification.failing_stages() == [(0, 0)]

    def test_shape_mismatch_rejected(self):
        game = wrap_normal(np.zeros((2, 2)))
        policy = MarkovPolicy(np.full((2, 1, 2), 0.5), np.full((2, 1, 2), 0.5))
        with pytest.raises(ShapeError):
            verify_mpe_unique(game, policy)


class TestMarkovFeasibility:
    def make_policy(self, H, S, A, rng):
        return MarkovPolicy(rng.dirichlet(np.ones(A), size=(H, S)), rng.dirichlet(np.ones(A), size=(H, S)))

    def test_horizon_scales_the_attainable_interval(self):
        rng = np.random.default_rng(0)
        policy = self.make_policy(4, 2, 2, rng)
        ok = check_feasibility_markov(
            ModificationRequest(target=policy, value_range=(3.5, 5.0), bound=1.0), (2, 2), 4, 2
        )
        assert ok.feasible
        bad = check_feasibility_markov(
            ModificationRequest(target=policy, value_range=(4.0, 5.0), bound=1.0), (2, 2), 4, 2
        )
        assert not bad.feasible

    def test_stage_with_unequal_supports_is_infeasible(self):
        p = np.full((2, 1, 2), 0.5)
        q = np.full((2, 1, 2), 0.5)
        p[1, 0] = [1.0, 0.0]
        policy = MarkovPolicy(p, q)
        report = check_feasibility_markov(ModificationRequest(target=policy), (2, 2), 2, 1)
        assert not report.feasible
        assert any("h=1" in reason for reason in report.reasons)


class TestMarkovProgram:
    def test_horizon_one_single_state_model_matches_normal_form(self):
        payoff = np.array([[2.0, -3.0], [-3.0, 4.0]])
        target = StrategyProfile([7 / 12, 5 / 12], [7 / 12, 5 / 12])
        policy = MarkovPolicy(np.asarray(target.p)[None, None], np.asarray(target.q)[None, None])
        req_n = ModificationRequest(target=target, value_range=(0.0, 0.0), margin_sow=1e-3, margin_reward=1e-3)
        req_m = ModificationRequest(target=policy, value_range=(0.0, 0.0), margin_sow=1e-3, margin_reward=1e-3)

        normal = build_relaxed_program(MatrixGame(payoff), req_n)
        markov = build_relaxed_program_markov(wrap_normal(payoff), req_m)

        cn, an_ub, bn_ub, an_eq, bn_eq, bounds_n = normal.model._assemble()
        cm, am_ub, bm_ub, am_eq, bm_eq, bounds_m = markov.model._assemble()
        assert np.array_equal(cn, cm)
        assert np.array_equal(bn_ub, bm_ub) and np.array_equal(bn_eq, bm_eq)
        assert np.array_equal(bounds_n, bounds_m)
        assert (an_ub != am_ub).nnz == 0
        assert (an_eq != am_eq).nnz == 0

    def test_joint_optimum_beats_hand_built_feasible_point(self):
        rng = np.random.default_rng(8)
        H, S, A = 2, 2, 2
        game, policy = generate_random_markov(S, A, H, rng)
        req = ModificationRequest(target=policy, margin_sow=1e-3, margin_reward=1e-3)
        program = build_relaxed_program_markov(game, req)
        joint = solve_lp(program.model).objective

        # Feasible competitor: delta * erps + v*/H at every stage.
        hand = np.empty_like(game.rewards)
        for h in range(H):
            for s in range(S):
                hand[h, s] = 0.5 * build_erps(policy.stage(h, s)).matrix
        hand_cost = np.abs(hand - game.rewards).sum()
        assert joint <= hand_cost + 1e-9

    def test_infeasible_policy_raises(self):
        p = np.zeros((1, 1, 2))
        q = np.zeros((1, 1, 2))
        p[0, 0] = [1.0, 0.0]
        q[0, 0] = [0.5, 0.5]
        policy = MarkovPolicy(p, q)
        with pytest.raises(InfeasibleRequest):
            build_relaxed_program_markov(wrap_normal(np.zeros((2, 2))), ModificationRequest(target=policy))


class TestRapMg:
    def test_horizon_one_agrees_with_normal_form_rap(self):
        payoff = np.array([[2.0, -3.0], [-3.0, 4.0]])
        target = StrategyProfile([7 / 12, 5 / 12], [7 / 12, 5 / 12])
        policy = MarkovPolicy(np.asarray(target.p)[None, None], np.asarray(target.q)[None, None])
        res_n = rap(MatrixGame(payoff), ModificationRequest(target=target, value_range=(0.0, 0.0), seed=21))
        res_m = rap_mg(wrap_normal(payoff), ModificationRequest(target=policy, value_range=(0.0, 0.0), seed=21))
        assert res_m.modified.rewards[0, 0] == pytest.approx(res_n.modified.payoff, abs=1e-9)
        assert res_m.value == pytest.approx(res_n.value, abs=1e-9)
        assert res_m.cost == pytest.approx(res_n.cost, abs=1e-9)

    def test_random_instances_verify_and_stay_in_bounds(self):
        rng = np.random.default_rng(5)
        for trial in range(5):
            S, A, H = 3, 2, int(rng.integers(1, 5))
            game, policy = generate_random_markov(S, A, H, rng)
            game = MarkovGame(game.rewards, game.transitions, game.initial, bound=1.0)
            lo, hi = -0.3, 0.3
            res = rap_mg(game, ModificationRequest(target=policy, value_range=(lo, hi), bound=1.0, seed=trial))
            assert res.verification.valid
            assert lo - 1e-9 <= res.value <= hi + 1e-9
            assert np.max(np.abs(res.modified.rewards)) <= 1.0 + 1e-9
            assert res.max_stage_value_gap <= 1e-7

    def test_stage_values_unchanged_by_perturbation(self):
        rng = np.random.default_rng(6)
        game, policy = generate_random_markov(4, 2, 3, rng)
        res = rap_mg(game, ModificationRequest(target=policy, seed=9))
        unperturbed = backward_induction(
            MarkovGame(res.relaxed_rewards, game.transitions, game.initial)
        )
        assert np.max(np.abs(unperturbed.stage_values - res.stage_values)) <= 1e-8

    def test_seed_determinism(self):
        rng = np.random.default_rng(7)
        game, policy = generate_random_markov(2, 2, 2, rng)
        req = ModificationRequest(target=policy, seed=13)
        res1 = rap_mg(game, req)
        res2 = rap_mg(game, req)
        assert np.array_equal(res1.modified.rewards, res2.modified.rewards)
        assert np.array_equal(res1.epsilons, res2.epsilons)

    def test_cost_non_increasing_as_margins_shrink(self):
        rng = np.random.default_rng(14)
        game, policy = generate_random_markov(3, 2, 3, rng)
        costs = []
        relaxed = []
        for i in range(1, 4):
            margin = 10.0 ** -i
            res = rap_mg(
                game,
                ModificationRequest(target=policy, margin_sow=margin, margin_reward=margin, seed=1),
            )
            costs.append(res.cost)
            relaxed.append(res.cost_relaxed)
        assert all(costs[i + 1] <= costs[i] + 1e-6 for i in range(2))
        assert all(relaxed[i + 1] <= relaxed[i] + 1e-9 for i in range(2))


class TestDecomposition:
    def stagewise_sum(self, game: MarkovGame, policy: MarkovPolicy, margin: float) -> float:
        total = 0.0
        for h in range(game.horizon):
            for s in range(game.n_states):
                program = build_relaxed_program(
                    MatrixGame(game.rewards[h, s]),
                    ModificationRequest(
                        target=policy.stage(h, s), margin_sow=margin, margin_reward=margin
                    ),
                )
                total += solve_lp(program.model).objective
        return total

    def test_single_state_decomposes_exactly(self):
        # With one state the Bellman shift is constant across joint actions,
        # so the joint optimum is the sum of per-stage normal-form optima.
        rng = np.random.default_rng(12)
        game, policy = generate_random_markov(S=1, A=3, H=4, seed=rng)
        margin = 1e-3
        req = ModificationRequest(target=policy, margin_sow=margin, margin_reward=margin)
        joint = solve_lp(build_relaxed_program_markov(game, req).model).objective
        assert joint == pytest.approx(self.stagewise_sum(game, policy, margin), abs=1e-6)

    def test_action_independent_transitions_decompose_exactly(self):
        rng = np.random.default_rng(13)
        H, S, A = 3, 3, 2
        rewards = rng.uniform(-1, 1, size=(H, S, A, A))
        shared = rng.dirichlet(np.ones(S), size=(H - 1, S))
        transitions = np.broadcast_to(shared[:, :, None, None, :], (H - 1, S, A, A, S)).copy()
        game = MarkovGame(rewards, transitions, np.full(S, 1 / S))
        policy = MarkovPolicy(rng.dirichlet(np.ones(A), size=(H, S)), rng.dirichlet(np.ones(A), size=(H, S)))
        margin = 1e-3
        req = ModificationRequest(target=policy, margin_sow=margin, margin_reward=margin)
        joint = solve_lp(build_relaxed_program_markov(game, req).model).objective
        assert joint == pytest.approx(self.stagewise_sum(game, policy, margin), abs=1e-6)
