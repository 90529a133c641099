"""Exception hierarchy for fpte."""


class FpteError(Exception):
    """Base class for all library errors."""


class DomainError(FpteError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class PreconditionError(FpteError):
    """Model does not satisfy the assumptions of the requested formula."""


class IntegrabilityError(FpteError):
    """Improper integral or correlation kernel failed its convergence test."""


class NumericalFailure(FpteError):
    """Quadrature or simulation produced a non-finite or unconverged result."""


class ConfigError(FpteError):
    """Scenario configuration failed validation."""
