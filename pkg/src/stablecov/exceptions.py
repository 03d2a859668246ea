"""Exception hierarchy.

Validation errors signal bad inputs or violated preconditions (CLI exit
code 2); numerical errors signal computations that could not be completed
within the requested accuracy budget (CLI exit code 1).
"""

__all__ = [
    "StablecovError",
    "ValidationError",
    "CertificateError",
    "UnsupportedOrderError",
    "DegenerateError",
    "NumericalError",
    "ToleranceError",
    "UnstableLogError",
]


class StablecovError(Exception):
    """Base class for package errors."""


class ValidationError(StablecovError, ValueError):
    """An input violates a documented precondition."""


class CertificateError(ValidationError):
    """A filter's summability certificate does not hold."""


class UnsupportedOrderError(ValidationError):
    """Covariation requested for alpha <= 1, where it is undefined."""


class DegenerateError(ValidationError):
    """A normalizing moment vanishes (zero marginal, all-zero filter)."""


class NumericalError(StablecovError, RuntimeError):
    """A computation failed to meet its numerical contract."""


class ToleranceError(NumericalError):
    """The requested tolerance is unreachable within the resource budget."""


class UnstableLogError(NumericalError):
    """An empirical characteristic function value was too small to log."""
