"""Command-line interface.

Exit codes: 0 on success, 1 when a request is infeasible, 2 when
certification fails.  All randomness flows from --seed, so identical
invocations produce byte-identical output (benchmark wall-times excepted).

Mixing probabilities at or below 1e-12 in any target are treated as exactly
zero when computing supports; renormalization absorbs the difference.
"""
from __future__ import annotations

import sys

import click

from . import io as gio
from .bench import BenchmarkConfig, rows_to_csv, run_benchmark, run_golden_examples
from .erps import build_erps
from .errors import CertificationFailure, GamemodError, InfeasibleRequest
from .markov import rap_mg, verify_mpe_unique
from .modify import rap
from .types import ForeverCost, ModificationRequest, OneTimeCost
from .uniqueness import enumerate_nash, verify_unique_ne

EXIT_INFEASIBLE = 1
EXIT_CERTIFICATION = 2


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _run(fn):
    try:
        fn()
    except InfeasibleRequest as exc:
        click.echo(f"infeasible: {exc}", err=True)
        if exc.report is not None:
            click.echo(gio.dump_json(exc.report.to_dict()), err=True, nl=False)
        sys.exit(EXIT_INFEASIBLE)
    except CertificationFailure as exc:
        click.echo(f"certification failure: {exc}", err=True)
        sys.exit(EXIT_CERTIFICATION)
    except GamemodError as exc:
        raise click.ClickException(str(exc)) from exc


def _cost_spec(name: str):
    return OneTimeCost() if name == "l1" else ForeverCost()


_common_modify_options = [
    click.option("--value-lo", type=float, default=None, help="Lower end of the target value range."),
    click.option("--value-hi", type=float, default=None, help="Upper end of the target value range."),
    click.option("--bound", type=float, default=None, help="Payoff bound b (omit for unbounded)."),
    click.option("--cost", type=click.Choice(["l1", "forever"]), default="l1", show_default=True),
    click.option("--iota", type=float, default=0.01, show_default=True, help="Switch-out-worse margin."),
    click.option("--lambda", "lam", type=float, default=0.01, show_default=True, help="Reward-bound margin and perturbation half-width."),
    click.option("--seed", type=int, default=0, show_default=True),
    click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write JSON here instead of stdout."),
    click.option("--timing", is_flag=True, help="Include wall-clock timing in the output (nondeterministic)."),
]


def _with_options(options):
    def wrap(fn):
        for option in reversed(options):
            fn = option(fn)
        return fn

    return wrap


@click.group()
def main():
    """Minimally modify a zero-sum game so a target profile becomes its unique equilibrium."""


@main.command("modify-normal")
@click.option("--game", "game_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--target", "target_path", required=True, type=click.Path(exists=True, dir_okay=False))
@_with_options(_common_modify_options)
def modify_normal(game_path, target_path, value_lo, value_hi, bound, cost, iota, lam, seed, out, timing):
    """Modify a normal-form game (JSON: {"payoff": [[...]], "bound": ...})."""

    def go():
        game = gio.load_matrix_game(game_path)
        if bound is not None:
            game = type(game)(game.payoff, bound=bound)
        request = ModificationRequest(
            target=gio.load_profile(target_path),
            value_range=(value_lo, value_hi),
            bound=game.bound,
            cost=_cost_spec(cost),
            margin_sow=iota,
            margin_reward=lam,
            seed=seed,
        )
        result = rap(game, request)
        _emit(gio.dump_json(gio.result_to_dict(result, include_timing=timing)), out)

    _run(go)


@main.command("modify-markov")
@click.option("--game", "game_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--target", "target_path", required=True, type=click.Path(exists=True, dir_okay=False))
@_with_options(_common_modify_options)
def modify_markov(game_path, target_path, value_lo, value_hi, bound, cost, iota, lam, seed, out, timing):
    """Modify a Markov game (JSON schema: H/S/A1/A2/rewards/transitions/initial)."""

    def go():
        game = gio.load_markov_game(game_path)
        if bound is not None:
            game = type(game)(game.rewards, game.transitions, game.initial, bound=bound)
        request = ModificationRequest(
            target=gio.load_markov_policy(target_path),
            value_range=(value_lo, value_hi),
            bound=game.bound,
            cost=_cost_spec(cost),
            margin_sow=iota,
            margin_reward=lam,
            seed=seed,
        )
        result = rap_mg(game, request)
        _emit(gio.dump_json(gio.markov_result_to_dict(result, include_timing=timing)), out)

    _run(go)


@main.command("verify")
@click.option("--game", "game_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--profile", "profile_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--sii-tol", type=float, default=1e-7, show_default=True)
@click.option("--inv-tol", type=float, default=1e-9, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def verify(game_path, profile_path, sii_tol, inv_tol, out):
    """Certificate that a profile (or Markov policy) is the unique equilibrium."""

    def go():
        game_data = gio.read_json(game_path)
        if gio.is_markov_source(game_data):
            game = gio.load_markov_game(game_data)
            policy = gio.load_markov_policy(profile_path)
            verification = verify_mpe_unique(game, policy, sii_tol=sii_tol, inv_tol=inv_tol)
            payload = {
                "valid": verification.valid,
                "value": verification.value,
                "stage_values": verification.stage_values.tolist(),
                "certificates": [[c.to_dict() for c in row] for row in verification.certificates],
            }
        else:
            game = gio.load_matrix_game(game_data)
            profile = gio.load_profile(profile_path)
            cert = verify_unique_ne(game, profile, sii_tol=sii_tol, inv_tol=inv_tol)
            payload = cert.to_dict()
        _emit(gio.dump_json(payload), out)

    _run(go)


@main.command("erps")
@click.option("--target", "target_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default="json", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def erps_cmd(target_path, fmt, out):
    """Emit the extended rock-paper-scissors matrix for a target profile."""

    def go():
        profile = gio.load_profile(target_path)
        game = build_erps(profile)
        if fmt == "json":
            text = gio.dump_json(
                {
                    "matrix": game.matrix.tolist(),
                    "normalizer_c": game.normalizer_c,
                    "support_size_k": game.support_size_k,
                }
            )
        else:
            text = "\n".join(",".join(repr(x) for x in row) for row in game.matrix.tolist()) + "\n"
        _emit(text, out)

    _run(go)


@main.command("oracle")
@click.option("--game", "game_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--max-dim", type=int, default=6, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def oracle(game_path, max_dim, out):
    """Enumerate all equilibria of a small game (exhaustive oracle)."""

    def go():
        game = gio.load_matrix_game(game_path)
        found = enumerate_nash(game, max_dim=max_dim)
        payload = {
            "unique": len(found) == 1,
            "count": len(found),
            "equilibria": [
                {"p": prof.p.tolist(), "q": prof.q.tolist(), "value": value} for prof, value in found
            ],
        }
        _emit(gio.dump_json(payload), out)

    _run(go)


@main.command("bench")
@click.option("--mode", type=click.Choice(["actions-scaling", "horizon-scaling", "margin-sweep"]), required=True)
@click.option("--sizes", type=str, default=None, help="Comma-separated grid, e.g. 2,4,8.")
@click.option("--instances", type=int, default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--full", is_flag=True, help="Full-scale grid (up to 512); desk-scale otherwise.")
@click.option("--out", type=click.Path(dir_okay=False), default=None)
def bench(mode, sizes, instances, seed, full, out):
    """Run a benchmark sweep and emit CSV (size,n_instances,worst_time_s,worst_cost,all_certified)."""

    def go():
        parsed = tuple(int(s) for s in sizes.split(",")) if sizes else None
        config = BenchmarkConfig(mode=mode, sizes=parsed, n_instances=instances, seed=seed, full=full)
        rows = run_benchmark(config)
        _emit(rows_to_csv(rows), out)

    _run(go)


@main.command("golden")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Write the JSON report here.")
def golden(out):
    """Run the five bundled worked examples and report pass/fail."""

    def go():
        results = run_golden_examples()
        for result in results:
            click.echo(result.summary())
        if out:
            payload = [
                {
                    "name": r.name,
                    "passed": r.passed,
                    "cost": r.cost,
                    "value": r.value,
                    "checks": [{"check": desc, "ok": ok} for desc, ok in r.checks],
                }
                for r in results
            ]
            gio.dump_json(payload, out)
        if not all(r.passed for r in results):
            raise CertificationFailure("golden example checks failed")

    _run(go)


if __name__ == "__main__":
    main()
