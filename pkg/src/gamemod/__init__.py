"""Minimal reward modification for two-player zero-sum games.

Install a target strategy profile (or Markov policy) as the unique
equilibrium of a game, at a value inside a requested range, while minimizing
the change to the published rewards.
"""

from .erps import ErpsGame, build_erps
from .errors import (
    CertificationFailure,
    DimensionTooLarge,
    GamemodError,
    InfeasibleRequest,
    InvalidCost,
    InvalidStrategy,
    NumericalFailure,
    ShapeError,
    SolverFailure,
    UnequalSupports,
)
from .estimators import GameModifier, MarkovGameModifier
from .markov import (
    MarkovModificationResult,
    MpeVerification,
    StageDecomposition,
    backward_induction,
    build_relaxed_program_markov,
    check_feasibility_markov,
    rap_mg,
    verify_mpe_unique,
)
from .modify import (
    FeasibilityReport,
    ModificationResult,
    build_relaxed_program,
    check_feasibility_normal,
    rap,
)
from .types import (
    CostSpec,
    ForeverCost,
    MarkovGame,
    MarkovPolicy,
    MatrixGame,
    ModificationRequest,
    OneTimeCost,
    StrategyProfile,
    expected_payoff,
    modification_cost,
    support,
)
from .uniqueness import (
    UniquenessCertificate,
    ZeroSumSolution,
    check_inv,
    check_siisow,
    enumerate_nash,
    solve_zero_sum,
    verify_unique_ne,
)

__version__ = "0.1.0"

__all__ = [
    "MatrixGame",
    "StrategyProfile",
    "MarkovGame",
    "MarkovPolicy",
    "ModificationRequest",
    "OneTimeCost",
    "ForeverCost",
    "CostSpec",
    "expected_payoff",
    "modification_cost",
    "support",
    "UniquenessCertificate",
    "ZeroSumSolution",
    "check_siisow",
    "check_inv",
    "verify_unique_ne",
    "solve_zero_sum",
    "enumerate_nash",
    "ErpsGame",
    "build_erps",
    "FeasibilityReport",
    "ModificationResult",
    "check_feasibility_normal",
    "build_relaxed_program",
    "rap",
    "StageDecomposition",
    "MpeVerification",
    "MarkovModificationResult",
    "backward_induction",
    "verify_mpe_unique",
    "check_feasibility_markov",
    "build_relaxed_program_markov",
    "rap_mg",
    "GameModifier",
    "MarkovGameModifier",
    "GamemodError",
    "ShapeError",
    "InvalidStrategy",
    "UnequalSupports",
    "InvalidCost",
    "DimensionTooLarge",
    "InfeasibleRequest",
    "SolverFailure",
    "NumericalFailure",
    "CertificationFailure",
]
