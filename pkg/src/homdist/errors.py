"""Exception types; each maps to a CLI exit code."""


class HomdistError(Exception):
    exit_code = 1


class ParseError(HomdistError):
    exit_code = 2

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class PreconditionError(HomdistError, ValueError):
    exit_code = 3


class ConvergenceError(HomdistError, RuntimeError):
    """A solver hit its iteration cap; ``diagnostics`` holds the residuals."""

    exit_code = 4

    def __init__(self, message: str, diagnostics: dict | None = None):
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class InvariantError(HomdistError, AssertionError):
    """An internal consistency check failed; this indicates a bug."""

    exit_code = 5
