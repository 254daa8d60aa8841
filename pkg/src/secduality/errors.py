"""Exception hierarchy shared by the numerical modules and the CLI."""


class SecDualityError(Exception):
    """Base class for all package errors."""


class ValidationError(SecDualityError, ValueError):
    """Invalid model, scenario or argument."""


class DomainError(SecDualityError, ValueError):
    """MGF evaluated at or beyond its radius of convergence."""


class UnsupportedConfigurationError(SecDualityError):
    """Analytic path not available (e.g. non-integer Nakagami shape).

    Use :func:`secduality.montecarlo.estimate` for these scenarios.
    """


class SeriesMismatchError(SecDualityError, ValueError):
    """Tilted-moment series evaluated at different points or too short."""


class DegenerateThresholdError(SecDualityError, ValueError):
    """Transmission threshold mu leaves no probability mass above it."""


class InsufficientConditioningError(SecDualityError):
    """Too few Monte Carlo samples hit the conditioning event."""
