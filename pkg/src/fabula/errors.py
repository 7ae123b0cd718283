"""Exception hierarchy shared by every fabula package.

Validation problems (bad inputs, schema violations, broken invariants) map
to CLI exit code 2; stage failures carry a stage tag and map to exit code 3.
"""

from typing import Optional


class FabulaError(Exception):
    """Base class for all fabula errors."""


class ValidationError(FabulaError, ValueError):
    """Input or record failed validation."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class AlignmentError(ValidationError):
    """Source and target dataset files are not line-aligned."""


class AnnotationError(ValidationError):
    """Annotation record violates the schema or the story bounds."""


class MissingFillError(ValidationError):
    """Deanonymization was asked to fill a placeholder it has no fill for."""


class EmptyDatasetError(ValidationError):
    """A training or evaluation set has no examples."""


class StageError(FabulaError, RuntimeError):
    """A pipeline stage failed; `stage` names it."""

    def __init__(self, stage: str, message: str):
        self.stage = stage
        super().__init__(f"[{stage}] {message}")
