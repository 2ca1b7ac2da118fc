"""Exception hierarchy shared by the library and the command line.

Each family maps to a distinct CLI exit code.
"""


class AmbitoricError(Exception):
    exit_code = 1


class MalformedInputError(AmbitoricError, ValueError):
    """Unparseable literal, bad spec file, or structurally invalid input."""

    exit_code = 2

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            where = f"line {line}" + (f", column {column}" if column is not None else "")
            message = f"{where}: {message}"
        super().__init__(message)


class DegenerateInputError(AmbitoricError, ValueError):
    """Input data that produce an identically degenerate metric or form."""

    exit_code = 3


class ResourceError(AmbitoricError, RuntimeError):
    """Intermediate expression growth exceeded the configured degree cap."""

    exit_code = 4


class PoleError(AmbitoricError, ZeroDivisionError):
    def __init__(self, message, denominator_value=None):
        self.denominator_value = denominator_value
        super().__init__(message)


class PreconditionError(AmbitoricError, ValueError):
    """A classifier was called on data outside its domain."""


class InconsistencyError(AmbitoricError, RuntimeError):
    """Two routes that must agree exactly did not."""
