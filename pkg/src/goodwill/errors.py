"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: ``ValidationError`` (and subclasses) is a
configuration problem, ``DomainError`` a numerical one.
"""


class GoodwillError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(GoodwillError, ValueError):
    """An input violates a documented precondition or invariant."""

    def __init__(self, message, field=None):
        self.field = field
        if field is not None and field not in message:
            message = f"{field}: {message}"
        super().__init__(message)


class AlignmentError(ValidationError):
    """A time does not coincide with a node of the simulation grid."""


class FormatError(ValidationError):
    """A delimited input table is malformed.

    ``row`` is the zero-based data row index (header excluded) when known.
    """

    def __init__(self, message, row=None, field=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message, field=field)


class DomainError(GoodwillError, ArithmeticError):
    """A numerical quantity is outside the domain of an operation."""


class ConsistencyError(DomainError):
    """Two objects that must describe the same rotation disagree."""


class PreconditionError(DomainError):
    """An operation was called on integrals it is not defined for."""
