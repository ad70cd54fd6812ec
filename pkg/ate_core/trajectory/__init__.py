"""
Trajectory module: loading, association, alignment and ATE labelling.

This module provides everything needed to turn an estimated trajectory and
its ground truth into sub-trajectory training labels.
"""

from .alignment import align, alignment_residuals, compute_ate, rmse_after_alignment
from .association import DEFAULT_MAX_TIME_OFFSET, associate
from .examples import generate_subtrajectory_examples
from .io import load_trajectory, save_trajectory
from .types import (
    AlignmentMode,
    AlignmentResult,
    Association,
    FrameId,
    OperatingMode,
    Pose,
    SubTrajectoryExample,
    Trajectory,
)

__all__ = [
    "AlignmentMode",
    "AlignmentResult",
    "Association",
    "FrameId",
    "OperatingMode",
    "Pose",
    "SubTrajectoryExample",
    "Trajectory",
    "DEFAULT_MAX_TIME_OFFSET",
    "align",
    "alignment_residuals",
    "associate",
    "compute_ate",
    "generate_subtrajectory_examples",
    "load_trajectory",
    "rmse_after_alignment",
    "save_trajectory",
]
