"""Exception hierarchy for fractalsurf."""


class FractalSurfError(Exception):
    """Base class for all library errors."""


class NonIncreasingKnots(FractalSurfError, ValueError):
    pass


class TooFewIntervals(FractalSurfError, ValueError):
    pass


class OutOfDomain(FractalSurfError, ValueError):
    pass


class ResolutionMismatch(FractalSurfError, ValueError):
    pass


class ResolutionTooCoarse(FractalSurfError, ValueError):
    pass


class ShapeMismatch(FractalSurfError, ValueError):
    pass


class BadExponent(FractalSurfError, ValueError):
    pass


class MaxIterExceeded(FractalSurfError, RuntimeError):
    """Raised when the fixed-point solver runs out of iterations.

    The best iterate and its diagnostics are attached so callers can still
    inspect or use the partial result.
    """

    def __init__(self, message, field=None, iterations=None, residual=None):
        super().__init__(message)
        self.field = field
        self.iterations = iterations
        self.residual = residual


class MaxTermsExceeded(FractalSurfError, RuntimeError):
    def __init__(self, message, estimate=None, terms=None, residual=None):
        super().__init__(message)
        self.estimate = estimate
        self.terms = terms
        self.residual = residual


class PointBudgetExceeded(FractalSurfError, RuntimeError):
    pass


class InadmissibleScale(FractalSurfError, ValueError):
    pass


class CornerValueViolation(FractalSurfError, ValueError):
    pass


class CornerFixViolation(FractalSurfError, ValueError):
    pass


class IdentityOperator(FractalSurfError, ValueError):
    pass


class IdentityMap(IdentityOperator):
    pass


class DegreeTooSmall(FractalSurfError, ValueError):
    pass


class PreconditionViolated(FractalSurfError, ValueError):
    pass


class UnbalancedScaling(FractalSurfError, ValueError):
    pass


class HypothesisUnmet(FractalSurfError, ValueError):
    pass


class RankDeficient(FractalSurfError, ValueError):
    pass


class DegreeBudgetExceeded(FractalSurfError, RuntimeError):
    pass


class ApproximationFailed(FractalSurfError, RuntimeError):
    pass


class ConfigError(FractalSurfError):
    """Base for configuration problems; ``field`` names the offending path."""

    def __init__(self, message, field=None):
        super().__init__(f"{field}: {message}" if field else message)
        self.field = field


class ParseError(ConfigError):
    pass


class ValidationError(ConfigError):
    pass


class IoError(FractalSurfError, OSError):
    pass
