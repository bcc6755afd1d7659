"""Exception hierarchy shared by all modules.

The CLI maps these onto exit codes: input-format problems exit with 2 and
numerical failures exit with 3.
"""


class TriadicError(Exception):
    """Base class for all package errors."""


class InputFormatError(TriadicError, ValueError):
    """Malformed or inconsistent input data."""


class ParseError(InputFormatError):
    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class ValidationError(InputFormatError):
    """A record parsed but violates a domain invariant (e.g. a self-loop)."""


class OrderingError(InputFormatError):
    """Stream timestamps decrease beyond what the reorder buffer can absorb."""


class InfeasibleError(InputFormatError):
    """A requested synthetic structure cannot be realized."""


class NumericalError(TriadicError, ArithmeticError):
    """Base class for numerical failures."""


class SingularModelError(NumericalError):
    """A sampling model has (numerically) zero detection probability."""


class SingularDesignError(NumericalError):
    """A Fisher information matrix is singular or too ill-conditioned to invert."""

    def __init__(self, message, condition=None):
        self.condition = condition
        if condition is not None:
            message = f"{message} (condition number {condition:.3g})"
        super().__init__(message)


class NoSignalError(NumericalError):
    """Observation vector carries no information (all counts zero)."""
