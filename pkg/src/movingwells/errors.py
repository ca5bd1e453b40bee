"""Exception types shared across the package."""


class MovingWellsError(Exception):
    """Base class for all package errors."""


class DomainError(MovingWellsError, ValueError):
    """A spatial or phase point lies outside the admissible region."""


class ParameterError(MovingWellsError, ValueError):
    """Inconsistent or out-of-range construction parameters."""


class DegenerateInputError(MovingWellsError, ValueError):
    """Input is geometrically degenerate (zero length, zero radius, ...)."""


class UsageError(MovingWellsError, TypeError):
    """An operation was called on an object it does not support."""
