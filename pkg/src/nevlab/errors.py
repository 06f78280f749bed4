"""Exception hierarchy shared by all nevlab modules."""


class NevlabError(Exception):
    """Base class for every error raised by nevlab."""


class ConfigurationError(NevlabError, ValueError):
    """Invalid numerical or experiment configuration."""

    def __init__(self, message, field=None):
        self.field = field
        if field:
            message = f"{field}: {message}"
        super().__init__(message)


class InvalidProfileError(NevlabError, ValueError):
    """Curvature profile is positive, non-monotone, or malformed."""


class DomainError(NevlabError, ValueError):
    """Point or radius lies outside the admissible domain."""


class PoleError(NevlabError, ValueError):
    """Evaluation at the pole of a Green kernel or at a base-point preimage."""


class IntegrabilityError(NevlabError, ArithmeticError):
    """Quadrature failed to converge (non-integrable or under-resolved integrand)."""


class NonExitError(NevlabError, RuntimeError):
    """A simulated path hit the step cap before leaving the ball."""


class ReliabilityError(NevlabError, RuntimeError):
    """Too many censored paths for a Monte Carlo estimate to be trusted."""


class RootFindingError(NevlabError, RuntimeError):
    """Preimage locator disagrees with the argument-principle count."""


class DegenerateInputError(NevlabError, ValueError):
    """Input is constant or otherwise degenerate for the requested audit."""


class MonotonicityError(NevlabError, ValueError):
    """Samples of a function required to be nondecreasing decrease somewhere."""
