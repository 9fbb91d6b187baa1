"""Exception hierarchy shared by every stage of the pipeline."""


class DZPError(Exception):
    """Base class for all errors raised by :mod:`dzp`."""


class ValidationError(DZPError, ValueError):
    """Bad user input: malformed files, configs or arguments (CLI exit code 1)."""


class ParseError(ValidationError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(ValidationError):
    def __init__(self, key: str, message: str):
        self.key = key
        super().__init__(f"{key}: {message}")


class ConsistencyError(DZPError, RuntimeError):
    """An internal invariant was violated (CLI exit code 2)."""


class StageError(DZPError):
    """Wraps a failure with the pipeline stage and snapshot it happened in."""

    def __init__(self, stage: str, snapshot: int | None, cause: Exception):
        self.stage = stage
        self.snapshot = snapshot
        self.cause = cause
        where = f"stage {stage!r}"
        if snapshot is not None:
            where += f", snapshot {snapshot}"
        super().__init__(f"{where}: {cause}")
