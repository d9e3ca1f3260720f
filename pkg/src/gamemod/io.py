"""JSON (de)serialization of games, profiles, certificates and results.

Schemas
-------
normal-form game   {"payoff": [[...]], "bound": number|null}
Markov game        {"H": int, "S": int, "A1": int, "A2": int,
                    "rewards": [h][s][i][j], "transitions": [h][s][i][j][s'],
                    "initial": [...], "bound": number|null}
profile            {"p": [...], "q": [...]}
Markov policy      {"p": [h][s][...], "q": [h][s][...]}

Dumps are key-sorted with round-tripping float repr, so identical objects
serialize to identical bytes.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ShapeError
from .markov import MarkovModificationResult
from .modify import ModificationResult
from .types import MarkovGame, MarkovPolicy, MatrixGame, StrategyProfile
from .uniqueness import UniquenessCertificate

__all__ = [
    "load_matrix_game",
    "load_markov_game",
    "load_profile",
    "load_markov_policy",
    "matrix_game_to_dict",
    "markov_game_to_dict",
    "result_to_dict",
    "markov_result_to_dict",
    "dump_json",
    "read_json",
]


def read_json(path: str | Path) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def dump_json(obj, path: str | Path | None = None) -> str:
    text = json.dumps(obj, sort_keys=True, indent=2) + "\n"
    if path is not None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    return text


def _require(data: dict, key: str, context: str):
    if key not in data:
        raise ShapeError(f"{context}: missing key {key!r}")
    return data[key]


def load_matrix_game(source: dict | str | Path) -> MatrixGame:
    data = source if isinstance(source, dict) else read_json(source)
    payoff = _require(data, "payoff", "normal-form game")
    return MatrixGame(np.asarray(payoff, dtype=float), bound=data.get("bound"))


def matrix_game_to_dict(game: MatrixGame) -> dict:
    return {"payoff": game.payoff.tolist(), "bound": game.bound}


def load_profile(source: dict | str | Path) -> StrategyProfile:
    data = source if isinstance(source, dict) else read_json(source)
    return StrategyProfile(_require(data, "p", "profile"), _require(data, "q", "profile"))


def profile_to_dict(profile: StrategyProfile) -> dict:
    return {"p": profile.p.tolist(), "q": profile.q.tolist()}


def load_markov_game(source: dict | str | Path) -> MarkovGame:
    data = source if isinstance(source, dict) else read_json(source)
    H = int(_require(data, "H", "Markov game"))
    S = int(_require(data, "S", "Markov game"))
    m = int(_require(data, "A1", "Markov game"))
    n = int(_require(data, "A2", "Markov game"))
    rewards = np.asarray(_require(data, "rewards", "Markov game"), dtype=float)
    if rewards.shape != (H, S, m, n):
        raise ShapeError(f"rewards shape {rewards.shape} does not match (H, S, A1, A2) = {(H, S, m, n)}")
    transitions = np.asarray(_require(data, "transitions", "Markov game"), dtype=float)
    transitions = transitions.reshape(max(H - 1, 0), S, m, n, S)
    initial = np.asarray(_require(data, "initial", "Markov game"), dtype=float)
    return MarkovGame(rewards, transitions, initial, bound=data.get("bound"))


def markov_game_to_dict(game: MarkovGame) -> dict:
    m, n = game.action_shape
    return {
        "H": game.horizon,
        "S": game.n_states,
        "A1": m,
        "A2": n,
        "rewards": game.rewards.tolist(),
        "transitions": game.transitions.tolist(),
        "initial": game.initial.tolist(),
        "bound": game.bound,
    }


def load_markov_policy(source: dict | str | Path) -> MarkovPolicy:
    data = source if isinstance(source, dict) else read_json(source)
    return MarkovPolicy(
        np.asarray(_require(data, "p", "Markov policy"), dtype=float),
        np.asarray(_require(data, "q", "Markov policy"), dtype=float),
    )


def markov_policy_to_dict(policy: MarkovPolicy) -> dict:
    return {"p": policy.p.tolist(), "q": policy.q.tolist()}


def is_markov_source(data: dict) -> bool:
    """Distinguish the Markov game/policy schemas from the normal-form ones."""
    return "transitions" in data or "H" in data or (isinstance(data.get("p"), list) and np.ndim(data.get("p")) == 3)


def certificate_to_dict(cert: UniquenessCertificate) -> dict:
    return cert.to_dict()


def result_to_dict(result: ModificationResult, include_timing: bool = False) -> dict:
    """ModificationResult as JSON-ready dict; timing is opt-in because it is
    the one field that varies between identical runs."""
    return {
        "modified": matrix_game_to_dict(result.modified),
        "value": result.value,
        "cost": result.cost,
        "cost_relaxed": result.cost_relaxed,
        "epsilon": result.epsilon,
        "certificate": result.certificate.to_dict(),
        "stats": result.stats.to_dict(include_timing=include_timing),
    }


def markov_result_to_dict(result: MarkovModificationResult, include_timing: bool = False) -> dict:
    return {
        "modified": markov_game_to_dict(result.modified),
        "value": result.value,
        "stage_values": result.stage_values.tolist(),
        "cost": result.cost,
        "cost_relaxed": result.cost_relaxed,
        "epsilons": result.epsilons.tolist(),
        "certificates": [
            [cert.to_dict() for cert in row] for row in result.verification.certificates
        ],
        "valid": result.verification.valid,
        "stats": result.stats.to_dict(include_timing=include_timing),
    }
