"""
Sub-trajectory example generation.

A sequence of K keyframes yields K examples: example k covers keyframes
[1, k] and is labelled with the ATE of that prefix. Every estimate pose is
treated as a keyframe.
"""

import logging
from typing import Optional, Union

import numpy as np
from joblib import Parallel, delayed

from ..errors import DegenerateGeometryError, InsufficientDataError
from .alignment import MIN_ALIGNMENT_POINTS, rmse_after_alignment
from .association import DEFAULT_MAX_TIME_OFFSET, associate
from .types import AlignmentMode, SubTrajectoryExample, Trajectory

logger = logging.getLogger(__name__)

SKIP_TOO_SHORT = "fewer than 3 matched poses"
SKIP_DEGENERATE = "degenerate geometry"


def _prefix_example(
    sequence_id: str,
    k: int,
    timestamp: float,
    est_points: np.ndarray,
    gt_points: np.ndarray,
    mode: AlignmentMode,
) -> SubTrajectoryExample:
    if est_points.shape[0] < MIN_ALIGNMENT_POINTS:
        return SubTrajectoryExample(sequence_id, k, None, True, SKIP_TOO_SHORT, timestamp)
    try:
        ate = rmse_after_alignment(est_points, gt_points, mode)
    except (InsufficientDataError, DegenerateGeometryError):
        return SubTrajectoryExample(sequence_id, k, None, True, SKIP_DEGENERATE, timestamp)
    return SubTrajectoryExample(sequence_id, k, ate, False, None, timestamp)


def generate_subtrajectory_examples(
    estimate: Trajectory,
    ground_truth: Trajectory,
    mode: Union[AlignmentMode, str] = AlignmentMode.SE3,
    max_time_offset: float = DEFAULT_MAX_TIME_OFFSET,
    sequence_id: str = "sequence",
    n_jobs: Optional[int] = 1,
) -> list[SubTrajectoryExample]:
    """
    Label every keyframe prefix of a sequence with its ATE.

    Args:
        estimate: Estimated trajectory (K keyframes)
        ground_truth: Reference trajectory
        mode: Alignment mode used for every prefix
        max_time_offset: Association tolerance in seconds
        sequence_id: Identifier stored on each example
        n_jobs: Parallel workers for the per-prefix alignments

    Returns:
        Exactly K examples ordered by cutoff_k; prefixes that cannot be
        aligned are flagged skipped instead of raising
    """
    mode = AlignmentMode.parse(mode)
    association = associate(estimate, ground_truth, max_time_offset)
    est_idx = association.estimate_indices
    est_all = estimate.positions[est_idx]
    gt_all = ground_truth.positions[association.truth_indices]
    timestamps = estimate.timestamps

    # pairs whose estimate index is < k belong to prefix k
    counts = np.searchsorted(est_idx, np.arange(1, len(estimate) + 1), side="left")
    examples = Parallel(n_jobs=n_jobs)(
        delayed(_prefix_example)(
            sequence_id, k, float(timestamps[k - 1]),
            est_all[: counts[k - 1]], gt_all[: counts[k - 1]], mode,
        )
        for k in range(1, len(estimate) + 1)
    )
    skipped = sum(1 for e in examples if e.skipped)
    logger.info(
        "Sequence %s: %d examples (%d skipped, %s alignment)",
        sequence_id, len(examples), skipped, mode.value,
    )
    return list(examples)
