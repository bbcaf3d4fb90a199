"""Exception types raised by the public API.

Every error that callers are expected to catch derives from DriftgeoError,
so `except DriftgeoError` is a safe catch-all at CLI level.
"""


class DriftgeoError(Exception):
    """Base class for all library errors."""


class DegenerateMetric(DriftgeoError):
    """Metric failed the SPD check at one or more grid nodes."""

    def __init__(self, message, node=None):
        super().__init__(message)
        self.node = node


class NonPositivePotential(DriftgeoError):
    """The weight V must be strictly positive on the chart."""


class ResolutionTooLow(DriftgeoError):
    """Grid resolution is below the stencil width (or the minimum of 8)."""


class InvalidDimensionParameter(DriftgeoError):
    """mdim outside the admissible set (-inf, 0) | [n, +inf) | {inf}."""


class NonconstantPhiAtEqualDimension(DriftgeoError):
    """mdim == n is admissible only when the drift potential is constant."""


class EqualDimensionResidualUndefined(DriftgeoError):
    """Equality-case residual with the 1/|m-n| factor is undefined at m == n."""


class NoBoundary(DriftgeoError):
    """Operation requires a nonempty boundary but the manifold is closed."""


class NotClosed(DriftgeoError):
    """Operation requires a closed manifold (or closed boundary face)."""


class SolverDivergence(DriftgeoError):
    """A linear or eigenvalue solve did not reach the required residual."""


class IncompatibleData(DriftgeoError):
    """Right-hand side violates the Fredholm compatibility condition."""


class InsufficientRefinements(DriftgeoError):
    """Convergence-order estimation needs at least three refinement levels."""


class NegativeDiscriminant(DriftgeoError):
    """Discriminant in the Wentzell upper bound is negative."""


class NonpositiveEigenvalue(DriftgeoError):
    """Eigenvalue argument that must be strictly positive is <= 0."""


class DimensionTooLow(DriftgeoError):
    """Operation (e.g. Schouten tensor) needs dimension >= 3."""


class DegenerateImmersion(DriftgeoError):
    """Hypersurface parametrization has rank-deficient Jacobian somewhere."""


class InvalidTarget(DriftgeoError):
    """Unknown audit target or catalog identifier."""


class ParseError(DriftgeoError):
    """Expression could not be parsed; carries the offending position."""

    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class ScenarioError(DriftgeoError):
    """Scenario file is malformed or fails admissibility validation."""
