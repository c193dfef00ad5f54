"""Exceptions raised by polyspectral."""


# Invalid input.


class TooFewVertices(ValueError):
    """A polygon needs at least three vertices."""


class ClockwiseOrder(ValueError):
    """Polygon vertices are not in counterclockwise order."""


class NonConvex(ValueError):
    """Polygon is not strictly convex."""


class DegenerateSide(ValueError):
    """Two consecutive vertices coincide."""


class GeometryViolation(ValueError):
    """A gauge transform failed to produce the requested position."""


GaugeViolation = GeometryViolation


class ZeroLambda(ValueError):
    """The spectral parameter lambda must be nonzero."""


class ZeroMu(ValueError):
    """The exponential-solution parameter mu must be nonzero."""


class MaxOrderExceeded(ValueError):
    """A Dirac derivative order exceeds the configured maximum."""


class InsufficientDerivativeOrder(ValueError):
    """A smooth function can't supply the derivatives a pairing needs."""


class PointNotInterior(ValueError):
    """An evaluation point is not strictly inside the polygon."""


class PointOnBoundary(ValueError):
    """An evaluation point is not strictly inside the half-strip."""


class AngleOutOfRange(ValueError):
    """A corner angle lies outside the open interval (0, pi)."""


class DomainError(ValueError):
    """Arguments lie outside the domain of an asymptotic formula."""


class ConstraintViolation(ValueError):
    """Coefficients fail a required linear constraint."""


class ProblemFileError(ValueError):
    """A problem or solution file is malformed."""


# Numerical failure.


class QuadratureNonConvergence(ArithmeticError):
    """Adaptive quadrature reached its refinement cap without converging."""


class TruncationFailure(ArithmeticError):
    """A ray integrand never decays below the requested tolerance."""


class RankDeficient(ArithmeticError):
    """The collocation matrix is numerically rank deficient."""


class NonConvergence(ArithmeticError):
    """The solved boundary data fail validation of the global relation."""


class FitFailure(ArithmeticError):
    """Decay data are unsuitable for an exponential fit."""
