"""Exception types shared by every module in the package."""


class ClearingError(Exception):
    """Base class for all errors raised by netclear."""


class UnknownParticipantError(ClearingError):
    """A participant id was looked up that the network does not contain."""


class UnknownArcError(ClearingError):
    """An arc reference (index or endpoint pair) does not exist in the network."""


class ValidationError(ClearingError):
    """Input data violates a structural rule (self-loop, duplicate arc,
    non-integer amount, infeasible flow, malformed preferences, ...)."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParseError(ClearingError):
    """A file could not be parsed at all (bad header, wrong field count)."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ParameterError(ClearingError):
    """An algorithm parameter is out of range (epsilon, cost magnitude, ...)."""


class ConfigError(ClearingError):
    """A generator or simulation configuration is unusable."""


class InternalInvariantError(ClearingError):
    """An internal consistency check failed; indicates a bug, not bad input."""
