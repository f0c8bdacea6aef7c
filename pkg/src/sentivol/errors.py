"""Exception types shared across the package.

Two broad families matter to callers: ``InputError`` for anything wrong
with user-supplied files, records, or arguments (CLI exit code 1), and
``NumericalError`` for estimation failures such as rank deficiency or
non-convergence (CLI exit code 2).
"""

from __future__ import annotations


class SentivolError(Exception):
    """Base class for all package errors."""


class InputError(SentivolError):
    """Invalid user input: missing files, bad records, empty inputs."""


class MalformedRecordError(InputError):
    """A record failed to parse; carries the file path and line number."""

    def __init__(self, message: str, path: str, line: int) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = path
        self.line = line


class NumericalError(SentivolError):
    """Estimation failed: rank deficiency, non-finite values, no convergence."""


class PipelineStageError(SentivolError):
    """Wraps a module error with the pipeline stage where it occurred."""

    def __init__(self, stage: str, cause: Exception) -> None:
        super().__init__(f"stage '{stage}': {cause}")
        self.stage = stage
        self.cause = cause
