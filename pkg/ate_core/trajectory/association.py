"""
Timestamp association between an estimate and its ground truth.

Candidate pairs within the allowed offset are accepted greedily by
increasing time difference; a pair is rejected if either pose is already
used or if it would cross an accepted pair, so the result is monotone.
"""

import bisect
import logging

import numpy as np

from ..errors import AssociationError
from .types import Association, Trajectory

logger = logging.getLogger(__name__)

DEFAULT_MAX_TIME_OFFSET = 0.02


def associate(
    estimate: Trajectory,
    ground_truth: Trajectory,
    max_time_offset: float = DEFAULT_MAX_TIME_OFFSET,
) -> Association:
    """
    Match estimate poses to ground-truth poses by nearest timestamp.

    Args:
        estimate: The estimated trajectory
        ground_truth: The reference trajectory
        max_time_offset: Largest accepted |t_est - t_gt| in seconds

    Returns:
        Monotone Association sorted by estimate index
    """
    if max_time_offset < 0:
        raise ValueError(f"max_time_offset must be >= 0, got {max_time_offset}")
    t_est = estimate.timestamps
    t_gt = ground_truth.timestamps

    candidates: list[tuple[float, int, int]] = []
    for i, t in enumerate(t_est):
        lo = int(np.searchsorted(t_gt, t - max_time_offset, side="left"))
        hi = int(np.searchsorted(t_gt, t + max_time_offset, side="right"))
        for j in range(lo, hi):
            dt = abs(t - t_gt[j])
            if dt <= max_time_offset:
                candidates.append((dt, i, j))
    candidates.sort()

    used_gt: set[int] = set()
    accepted_est: list[int] = []  # sorted
    gt_of: dict[int, int] = {}
    for _, i, j in candidates:
        if i in gt_of or j in used_gt:
            continue
        pos = bisect.bisect_left(accepted_est, i)
        if pos > 0 and gt_of[accepted_est[pos - 1]] >= j:
            continue
        if pos < len(accepted_est) and gt_of[accepted_est[pos]] <= j:
            continue
        accepted_est.insert(pos, i)
        gt_of[i] = j
        used_gt.add(j)

    if not accepted_est:
        raise AssociationError(
            f"No timestamp pairs within {max_time_offset} s "
            f"({len(t_est)} estimate / {len(t_gt)} ground-truth poses)"
        )
    logger.debug("Associated %d of %d estimate poses", len(accepted_est), len(t_est))
    return Association(tuple((i, gt_of[i]) for i in accepted_est), max_time_offset)
