"""Exception hierarchy for game construction, solving and certification."""


class GamemodError(Exception):
    """Base class for all errors raised by this package."""


class ShapeError(GamemodError):
    """Dimensions of games, strategies or policies do not line up."""


class InvalidStrategy(GamemodError):
    """A probability vector is malformed or has empty support."""


class UnequalSupports(GamemodError):
    """Row and column supports differ in size where a square block is required."""


class InvalidCost(GamemodError):
    """A cost specification carries negative or non-finite weights."""


class DimensionTooLarge(GamemodError):
    """An exhaustive oracle was asked to run on a game above its size cap."""


class InfeasibleRequest(GamemodError):
    """The modification problem has no solution under the given constraints."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class SolverFailure(GamemodError):
    """An LP backend failed to return an optimal solution where one must exist."""


class NumericalFailure(GamemodError):
    """The LP backend broke down or returned a solution violating feasibility."""


class CertificationFailure(GamemodError):
    """Perturbation redraws were exhausted without a valid uniqueness certificate."""
