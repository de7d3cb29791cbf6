"""Exception hierarchy.

The CLI maps these onto exit codes: parse errors 2, precondition failures 3,
theorem-violation alarms 4.
"""


class QtError(Exception):
    """Base class for all errors raised by qtrans."""


class ContextError(QtError, ValueError):
    """Polynomials live in incompatible variable contexts, or a variable is unknown."""


class PreconditionError(QtError, ValueError):
    """An operation was called outside its documented domain."""


class WitnessError(PreconditionError):
    """A certificate witness is malformed or degenerate."""


class ResourceCapExceeded(QtError):
    """A linear system would exceed the configured entry cap."""

    def __init__(self, message, entries=None, cap=None):
        super().__init__(message)
        self.entries = entries
        self.cap = cap


class BoundExhausted(QtError):
    """No relation exists up to the requested degree bound."""

    def __init__(self, message, dmax=None):
        super().__init__(message)
        self.dmax = dmax


class TheoremViolation(QtError):
    """A proved statement failed on a concrete input.

    This always indicates a bug (or an input that silently violated a
    precondition), never a mathematical state.
    """


class ParseError(QtError, ValueError):
    def __init__(self, message, line=1, col=1):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col
        self.reason = message


class NotDivisible(QtError, ArithmeticError):
    """Exact polynomial division left a nonzero remainder."""
