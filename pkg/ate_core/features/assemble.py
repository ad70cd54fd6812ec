"""
Dataset assembly: pair each labelled prefix with its pooled descriptor.

A sequence is characterized once. The prefix ending at keyframe k covers the
frames with timestamp <= t_k + max_time_offset, i.e. the first n_k columns
of the sequence matrix.
"""

import logging
from typing import Iterable, Optional, Sequence, Union

import numpy as np
from joblib import Parallel, delayed

from ..characterization.types import CharacterizationMatrix
from ..pooling.pool import pool
from ..pooling.types import PoolingFunction, PoolKind
from ..trajectory.association import DEFAULT_MAX_TIME_OFFSET
from ..trajectory.types import SubTrajectoryExample
from .types import Dataset, Example

logger = logging.getLogger(__name__)


def prefix_frame_count(
    frame_timestamps: np.ndarray,
    keyframe_timestamp: float,
    max_time_offset: float = DEFAULT_MAX_TIME_OFFSET,
) -> int:
    """Number of frames (sorted timestamps) up to a keyframe, with tolerance."""
    return int(np.searchsorted(frame_timestamps, keyframe_timestamp + max_time_offset,
                               side="right"))


def _pool_prefix(
    matrix: CharacterizationMatrix, n: int, f: PoolingFunction, label: SubTrajectoryExample
) -> Example:
    descriptor = pool(matrix.prefix(n), f, source_id=f"{label.sequence_id}@{label.cutoff_k}")
    return Example(descriptor, label.ate, label.sequence_id, label.cutoff_k)


def build_examples(
    labels: Iterable[SubTrajectoryExample],
    matrix: CharacterizationMatrix,
    f: Union[PoolingFunction, PoolKind, str] = PoolKind.MEAN,
    max_time_offset: float = DEFAULT_MAX_TIME_OFFSET,
    n_jobs: int = 1,
) -> list[Example]:
    """
    Build the usable examples of one sequence.

    Skipped labels, and prefixes that start before the first frame, are left out.

    Args:
        labels: Sub-trajectory labels of the sequence
        matrix: Full-sequence characterization matrix with timestamps
        f: Pooling function
        max_time_offset: Keyframe/frame timestamp tolerance in seconds
        n_jobs: joblib workers

    Returns:
        Examples in cutoff order
    """
    if not isinstance(f, PoolingFunction):
        f = PoolingFunction(kind=PoolKind.parse(f))
    if matrix.timestamps is None:
        raise ValueError(f"Matrix of {matrix.sequence_id!r} carries no frame timestamps")

    jobs: list[tuple[int, SubTrajectoryExample]] = []
    n_uncovered = 0
    for label in labels:
        if label.skipped:
            continue
        if label.timestamp is None:
            raise ValueError(f"Label {label.sequence_id}@{label.cutoff_k} has no timestamp")
        n = prefix_frame_count(matrix.timestamps, label.timestamp, max_time_offset)
        if n < 1:
            n_uncovered += 1
            continue
        jobs.append((n, label))
    if n_uncovered:
        logger.warning("%s: %d prefixes end before the first frame", matrix.sequence_id,
                       n_uncovered)

    return Parallel(n_jobs=n_jobs)(
        delayed(_pool_prefix)(matrix, n, f, label) for n, label in jobs
    )


def build_dataset(
    sequences: Sequence[tuple[Sequence[SubTrajectoryExample], CharacterizationMatrix]],
    f: Union[PoolingFunction, PoolKind, str] = PoolKind.MEAN,
    testcase_id: str = "",
    max_time_offset: float = DEFAULT_MAX_TIME_OFFSET,
    feature_names: Optional[Sequence[str]] = None,
    n_jobs: int = 1,
) -> Dataset:
    """Concatenate the examples of several sequences, in listed order."""
    examples: list[Example] = []
    for labels, matrix in sequences:
        examples.extend(build_examples(labels, matrix, f, max_time_offset, n_jobs))
    if not examples and feature_names is None:
        raise ValueError(f"No usable examples for testcase {testcase_id!r}")
    names = examples[0].descriptor.feature_names if examples else tuple(feature_names)
    logger.info("Assembled %d examples from %d sequences for %s", len(examples),
                len(sequences), testcase_id or "dataset")
    return Dataset(tuple(examples), names, testcase_id)
