"""
Closed-form least-squares alignment and absolute trajectory error.

Alignment follows Umeyama: the rotation comes from the SVD of the
cross-covariance of the centred point sets, with a reflection guard so
det(R) = +1. Only translations enter the objective.
"""

import logging
from typing import Sequence, Union

import numpy as np

from ..errors import DegenerateGeometryError, InsufficientDataError
from .association import DEFAULT_MAX_TIME_OFFSET, associate
from .types import AlignmentMode, AlignmentResult, Association, Trajectory

logger = logging.getLogger(__name__)

MIN_ALIGNMENT_POINTS = 3
_SPREAD_EPS = 1e-12

PointsLike = Union[np.ndarray, Sequence[Sequence[float]]]


def align(
    estimate_points: PointsLike,
    truth_points: PointsLike,
    mode: Union[AlignmentMode, str] = AlignmentMode.SE3,
) -> AlignmentResult:
    """
    Find (s, R, t) minimizing sum ||truth_i - (s R est_i + t)||^2.

    Args:
        estimate_points: (N, 3) estimate positions
        truth_points: (N, 3) ground-truth positions, paired by row
        mode: SE3 (s fixed to 1) or Sim3

    Returns:
        AlignmentResult mapping estimate into the ground-truth frame
    """
    mode = AlignmentMode.parse(mode)
    est = np.asarray(estimate_points, dtype=np.float64).reshape(-1, 3)
    gt = np.asarray(truth_points, dtype=np.float64).reshape(-1, 3)
    if est.shape != gt.shape:
        raise ValueError(f"Point sets differ in size: {est.shape} vs {gt.shape}")
    n = est.shape[0]
    if n < MIN_ALIGNMENT_POINTS:
        raise InsufficientDataError(
            f"Alignment needs at least {MIN_ALIGNMENT_POINTS} point pairs, got {n}"
        )

    mu_est = est.mean(axis=0)
    mu_gt = gt.mean(axis=0)
    est_c = est - mu_est
    gt_c = gt - mu_gt

    sigma2_est = float((est_c ** 2).sum()) / n
    sigma2_gt = float((gt_c ** 2).sum()) / n
    scale_ref = max(1.0, float(np.abs(est).max()), float(np.abs(gt).max())) ** 2
    if sigma2_est <= _SPREAD_EPS * scale_ref or sigma2_gt <= _SPREAD_EPS * scale_ref:
        raise DegenerateGeometryError("Point set has no spread about its centroid")

    cov = gt_c.T @ est_c / n
    u, d, vt = np.linalg.svd(cov)
    s_fix = np.eye(3)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        s_fix[2, 2] = -1.0
    rotation = u @ s_fix @ vt

    if mode is AlignmentMode.SIM3:
        scale = float(np.trace(np.diag(d) @ s_fix)) / sigma2_est
        if scale <= 0:
            raise DegenerateGeometryError("Similarity alignment produced non-positive scale")
    else:
        scale = 1.0
    translation = mu_gt - scale * rotation @ mu_est
    return AlignmentResult(rotation=rotation, translation=translation, scale=scale, mode=mode)


def _matched_points(
    estimate: Trajectory, ground_truth: Trajectory, association: Association
) -> tuple[np.ndarray, np.ndarray]:
    est = estimate.positions[association.estimate_indices]
    gt = ground_truth.positions[association.truth_indices]
    return est, gt


def alignment_residuals(
    estimate_points: np.ndarray,
    truth_points: np.ndarray,
    mode: Union[AlignmentMode, str] = AlignmentMode.SE3,
) -> np.ndarray:
    """Per-pair translational error norms after alignment."""
    result = align(estimate_points, truth_points, mode)
    diff = np.asarray(truth_points, dtype=np.float64) - result.apply(estimate_points)
    return np.linalg.norm(diff, axis=1)


def rmse_after_alignment(
    estimate_points: np.ndarray,
    truth_points: np.ndarray,
    mode: Union[AlignmentMode, str] = AlignmentMode.SE3,
) -> float:
    """ATE of already-paired point sets."""
    residuals = alignment_residuals(estimate_points, truth_points, mode)
    return float(np.sqrt(np.mean(residuals ** 2)))


def compute_ate(
    estimate: Trajectory,
    ground_truth: Trajectory,
    mode: Union[AlignmentMode, str] = AlignmentMode.SE3,
    max_time_offset: float = DEFAULT_MAX_TIME_OFFSET,
) -> float:
    """
    Absolute trajectory error: translational RMSE after global alignment.

    Args:
        estimate: Estimated trajectory
        ground_truth: Reference trajectory
        mode: SE3 or Sim3 alignment
        max_time_offset: Association tolerance in seconds

    Returns:
        ATE in meters (non-negative)
    """
    association = associate(estimate, ground_truth, max_time_offset)
    est, gt = _matched_points(estimate, ground_truth, association)
    return rmse_after_alignment(est, gt, mode)
