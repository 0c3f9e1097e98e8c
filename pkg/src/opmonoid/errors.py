"""Exception hierarchy.

Validation problems subclass :class:`ValueError`; numerical breakdowns
subclass :class:`ArithmeticError`. The CLI maps the former to exit code 1
and the latter to exit code 2.
"""


class MonoidError(Exception):
    """Base class for every error raised by this package."""


class ValidationError(MonoidError, ValueError):
    pass


class SpaceMismatch(ValidationError):
    """A series does not live in the space the operation requires."""


class ZeroVector(ValidationError):
    pass


class IndexOverflow(ValidationError):
    """Composing two monoid indices left the unsigned 64-bit range."""


class NotCoprime(ValidationError):
    pass


class PowerTooSmall(ValidationError):
    pass


class KTooSmall(ValidationError):
    pass


class NotAnAleph(ValidationError):
    """The vector handed to an aleph shortcut is not inner for the monoid."""


class DegenerateTarget(ValidationError):
    """f(0) = f'(0): the target of the trace is undefined."""


class SolverError(MonoidError, ArithmeticError):
    pass


class SingularGram(SolverError):
    """Cholesky could not be trusted on this Gram matrix."""
