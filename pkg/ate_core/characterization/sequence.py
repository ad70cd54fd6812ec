"""
Frame and sequence characterization.

characterize_sequence builds the m x n matrix column by column; a column
depends only on its own frame, so the matrix of a prefix equals the leading
columns of the matrix of the full sequence.
"""

import logging
import math
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from ..errors import CharacterizationError
from .base import CharacterizationMetric
from .registry import DEFAULT_METRICS, MetricRegistry
from .types import CharacterizationMatrix, Frame, FrameCharacterization

logger = logging.getLogger(__name__)

MetricConfig = Union[Iterable[str], Sequence[CharacterizationMetric]]


def resolve_metrics(config: Optional[MetricConfig] = None) -> tuple[CharacterizationMetric, ...]:
    """Turn a metric-name list (or ready instances) into metric instances."""
    if config is None:
        return MetricRegistry.resolve(DEFAULT_METRICS)
    items = list(config)
    if not items:
        raise ValueError("Metric set must not be empty")
    if all(isinstance(m, CharacterizationMetric) for m in items):
        return tuple(items)
    return MetricRegistry.resolve(items)


def characterize_frame(
    frame: Frame,
    config: Optional[MetricConfig] = None,
) -> FrameCharacterization:
    """
    Evaluate every enabled metric on one frame.

    Args:
        frame: The frame to characterize
        config: Ordered metric names or instances (default: the 10-metric set)

    Returns:
        Values ordered as the metric set, with a coverage flag per metric;
        metrics whose modality is absent get their neutral value
    """
    metrics = resolve_metrics(config)
    values = np.empty(len(metrics), dtype=np.float64)
    coverage = np.zeros(len(metrics), dtype=bool)
    for i, metric in enumerate(metrics):
        if metric.applies_to(frame):
            value = metric.compute(frame)
            if not math.isfinite(value):
                raise CharacterizationError(f"metric {metric.name} produced {value}")
            values[i] = value
            coverage[i] = True
        else:
            values[i] = metric.neutral_value
    if not coverage.any():
        raise CharacterizationError(
            "no enabled metric applies to this frame "
            f"(metrics: {', '.join(m.name for m in metrics)})"
        )
    return FrameCharacterization(values=values, coverage=coverage)


def _characterize_indexed(
    index: int, frame: Frame, metrics: tuple[CharacterizationMetric, ...]
) -> FrameCharacterization:
    try:
        return characterize_frame(frame, metrics)
    except CharacterizationError as exc:
        raise CharacterizationError(str(exc), frame_index=index) from None


def characterize_sequence(
    frames: Sequence[Frame],
    config: Optional[MetricConfig] = None,
    sequence_id: str = "sequence",
    n_jobs: Optional[int] = 1,
) -> CharacterizationMatrix:
    """
    Characterize every frame of a (sub-)sequence.

    Args:
        frames: Frames in temporal order (at least one)
        config: Ordered metric names or instances
        sequence_id: Identifier stored on the matrix
        n_jobs: Parallel workers over frames

    Returns:
        CharacterizationMatrix with column j describing frames[j]
    """
    if not frames:
        raise CharacterizationError("sequence has no frames")
    metrics = resolve_metrics(config)
    columns = Parallel(n_jobs=n_jobs)(
        delayed(_characterize_indexed)(j, frame, metrics) for j, frame in enumerate(frames)
    )
    values = np.column_stack([c.values for c in columns])
    coverage = np.column_stack([c.coverage for c in columns])
    missing = int((~coverage).sum())
    if missing:
        logger.debug("Sequence %s: %d neutral-filled entries", sequence_id, missing)
    return CharacterizationMatrix(
        values=values,
        metric_names=tuple(m.name for m in metrics),
        sequence_id=sequence_id,
        coverage=coverage,
        timestamps=np.array([f.timestamp for f in frames], dtype=np.float64),
    )
