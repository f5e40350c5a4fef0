"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A scalar parameter violates its documented range."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class EvaluationError(RuntimeError):
    """A numerically unreachable state was reached (invariant breach)."""


class InvariantBreach(EvaluationError):
    """A quantity left the half-plane / sign sector it is proven to stay in."""


class AccuracyError(RuntimeError):
    """A quadrature or iteration failed to reach its accuracy target."""


class SaddleError(AccuracyError):
    """Newton iteration for a saddle point did not converge."""

    def __init__(self, message, last_iterate=None):
        super().__init__(message)
        self.last_iterate = last_iterate


class InfeasibleError(ValueError):
    """A parameter-design request has no solution."""


class FitQualityError(RuntimeError):
    """An empirical profile fit had too large a residual to be trusted."""


class ConfigError(ValueError):
    """A run configuration file is malformed or inconsistent."""
