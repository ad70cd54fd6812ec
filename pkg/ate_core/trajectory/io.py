"""
TUM trajectory text format.

One pose per line: "timestamp tx ty tz qx qy qz qw", whitespace separated,
lines starting with '#' are comments.
"""

import logging
import math
from pathlib import Path
from typing import Union

from ..atomic import atomic_write_text
from ..errors import EmptyTrajectoryError, TrajectoryParseError
from .types import FrameId, Pose, Trajectory

logger = logging.getLogger(__name__)

TUM_FIELDS = 8


def parse_tum_line(line: str, line_number: int) -> Pose:
    """
    Parse a single non-comment TUM line.

    Args:
        line: The stripped line text
        line_number: 1-based line number used in error messages

    Returns:
        The parsed Pose
    """
    parts = line.split()
    if len(parts) != TUM_FIELDS:
        raise TrajectoryParseError(
            f"expected {TUM_FIELDS} values, got {len(parts)}", line_number
        )
    try:
        values = [float(p) for p in parts]
    except ValueError as exc:
        raise TrajectoryParseError(f"non-numeric value ({exc})", line_number) from None
    if not all(math.isfinite(v) for v in values):
        raise TrajectoryParseError("non-finite value", line_number)
    try:
        return Pose.from_tum(*values)
    except ValueError as exc:
        raise TrajectoryParseError(str(exc), line_number) from None


def load_trajectory(
    path: Union[str, Path],
    format: str = "tum_text",
    frame_id: FrameId = FrameId.ESTIMATE,
) -> Trajectory:
    """
    Load a trajectory file.

    Args:
        path: File to read
        format: Only "tum_text" is supported
        frame_id: Label of the loaded trajectory

    Returns:
        Trajectory sorted by timestamp with normalized quaternions
    """
    if format != "tum_text":
        raise ValueError(f"Unsupported trajectory format: {format}")
    path = Path(path)
    poses: list[Pose] = []
    with path.open("r", encoding="ascii") as handle:
        for line_number, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            poses.append(parse_tum_line(line, line_number))
    if not poses:
        raise EmptyTrajectoryError(f"No poses in {path}")
    poses.sort(key=lambda p: p.timestamp)
    for prev, cur in zip(poses, poses[1:]):
        if cur.timestamp == prev.timestamp:
            raise TrajectoryParseError(f"duplicate timestamp {cur.timestamp} in {path}")
    logger.debug("Loaded %d poses from %s", len(poses), path)
    return Trajectory(tuple(poses), frame_id)


def save_trajectory(trajectory: Trajectory, path: Union[str, Path]) -> Path:
    """Write a trajectory as TUM text, one pose per line."""
    lines = ["# timestamp tx ty tz qx qy qz qw"]
    for pose in trajectory.poses:
        lines.append(" ".join(repr(v) for v in pose.to_tum()))
    return atomic_write_text(path, "\n".join(lines) + "\n", encoding="ascii")
