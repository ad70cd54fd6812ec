"""
Exception hierarchy for the ATE prediction algorithm layer.

Every error raised on invalid input derives from AtePredictionError, which
is itself a ValueError so callers that only guard against ValueError keep
working.
"""

from typing import Optional


class AtePredictionError(ValueError):
    """Base class for all domain errors raised by ate_core."""


class TrajectoryParseError(AtePredictionError):
    """A trajectory file line could not be parsed."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class EmptyTrajectoryError(AtePredictionError):
    """A trajectory source contained no poses."""


class AssociationError(AtePredictionError):
    """No estimate/ground-truth pairs could be matched."""


class InsufficientDataError(AtePredictionError):
    """Too few samples for the requested computation."""


class DegenerateGeometryError(AtePredictionError):
    """Point sets have no spread, so the alignment is undefined."""


class CharacterizationError(AtePredictionError):
    """A frame could not be characterized by any enabled metric."""

    def __init__(self, message: str, frame_index: Optional[int] = None):
        self.frame_index = frame_index
        if frame_index is not None:
            message = f"frame {frame_index}: {message}"
        super().__init__(message)


class SplitError(AtePredictionError):
    """A dataset cannot be partitioned as requested."""


class UndefinedMetricError(AtePredictionError):
    """A regression metric is undefined for the given targets."""


class WidthMismatchError(AtePredictionError):
    """A descriptor width does not match what the model expects."""

    def __init__(self, message: str, row: Optional[int] = None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class ModelFormatError(AtePredictionError):
    """A persisted model document is malformed or of an unknown version."""


class ConfigError(AtePredictionError):
    """The pipeline configuration is invalid."""
