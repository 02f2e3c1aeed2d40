"""Exception taxonomy shared across the package."""


class LoewnerError(Exception):
    """Base class for all package errors."""


class DomainError(LoewnerError, ValueError):
    """Input outside the mathematical domain of an operation."""


class PoleError(LoewnerError, ZeroDivisionError):
    """Evaluation requested at (or numerically on top of) a pole."""


class ValidationError(LoewnerError, ValueError):
    """A structural invariant of a value object is violated."""


class ConstraintError(LoewnerError, ValueError):
    """A construction problem has no solution for the given data."""


class InfeasibleError(ConstraintError):
    """A solved parameter landed outside its admissible range."""


class IntegrationError(LoewnerError, RuntimeError):
    """ODE integration could not continue.

    Carries the last accepted time and state so a caller can report
    how far the trajectory got before failing.
    """

    def __init__(self, message, t=None, w=None):
        super().__init__(message)
        self.t = t
        self.w = w


class NotTangentError(DomainError):
    """A boundary-arc operation was asked for a field that is not
    tangent to the unit circle along the arc."""


class ConfigError(LoewnerError, ValueError):
    """Configuration text failed to parse or validate.

    ``pointer`` is a JSON-pointer-style path to the offending member;
    ``byte_offset`` is set for syntax errors.
    """

    def __init__(self, message, pointer=None, byte_offset=None):
        detail = message
        if pointer is not None:
            detail = f"{pointer}: {message}"
        if byte_offset is not None:
            detail = f"{detail} (byte offset {byte_offset})"
        super().__init__(detail)
        self.pointer = pointer
        self.byte_offset = byte_offset
