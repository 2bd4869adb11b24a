"""Exception types shared across the package."""


class ParameterError(ValueError):
    """A parameter is outside its documented domain."""


class GraphParseError(ValueError):
    """An edge-list file is malformed; carries the offending line number."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UsageError(RuntimeError):
    """An API was called with an inconsistent combination of arguments."""


class UndefinedValueError(ValueError):
    """A requested quantity is mathematically undefined for the given input."""
