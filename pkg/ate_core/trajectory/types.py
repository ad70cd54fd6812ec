"""
Core type definitions for trajectories and their evaluation.

This module defines the value objects shared by loading, association,
alignment and sub-trajectory example generation. All of them are frozen
once constructed so they can be handed to parallel workers freely.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np


class FrameId(Enum):
    """Which side of an evaluation a trajectory belongs to."""
    ESTIMATE = "estimate"
    GROUND_TRUTH = "ground_truth"


class AlignmentMode(Enum):
    """Transformation family used to align an estimate onto ground truth."""
    SE3 = "SE3"
    SIM3 = "Sim3"

    @classmethod
    def parse(cls, value: "str | AlignmentMode") -> "AlignmentMode":
        """Accept enum members and case-insensitive names ("se3", "sim3")."""
        if isinstance(value, cls):
            return value
        for mode in cls:
            if mode.value.lower() == str(value).lower():
                return mode
        raise ValueError(f"Unknown alignment mode: {value}")


class OperatingMode(Enum):
    """SLAM operating mode, used as the prefix of testcase ids (e.g. "S-KITTI")."""
    MONOCULAR = "M"
    STEREO = "S"
    MONOCULAR_INERTIAL = "M-I"
    STEREO_INERTIAL = "S-I"

    @property
    def default_alignment(self) -> AlignmentMode:
        """Monocular runs have no metric scale and need a similarity alignment."""
        if self in (OperatingMode.MONOCULAR, OperatingMode.MONOCULAR_INERTIAL):
            return AlignmentMode.SIM3
        return AlignmentMode.SE3

    @classmethod
    def from_testcase_id(cls, testcase_id: str) -> Optional["OperatingMode"]:
        """
        Infer the operating mode from a "<mode>-<dataset>" testcase id.

        Returns:
            The mode, or None when the id carries no recognised prefix
        """
        # longest prefixes first so "M-I-EuroC" is not read as "M"
        for mode in sorted(cls, key=lambda m: -len(m.value)):
            if testcase_id.upper().startswith(mode.value + "-"):
                return mode
        return None


@dataclass(frozen=True)
class Pose:
    """
    Timestamped 3-D pose.

    The rotation is stored as a unit quaternion in (w, x, y, z) order and is
    normalized on construction.
    """
    timestamp: float
    translation: tuple[float, float, float]
    rotation: tuple[float, float, float, float] = (1.0, 0.0, 0.0, 0.0)

    def __post_init__(self):
        if not math.isfinite(self.timestamp):
            raise ValueError(f"Pose timestamp must be finite, got {self.timestamp}")
        if self.timestamp < 0:
            raise ValueError(f"Pose timestamp must be non-negative, got {self.timestamp}")
        translation = tuple(float(v) for v in self.translation)
        if len(translation) != 3 or not all(math.isfinite(v) for v in translation):
            raise ValueError(f"Pose translation must be a finite 3-vector: {self.translation}")
        quat = np.asarray(self.rotation, dtype=np.float64)
        norm = float(np.linalg.norm(quat)) if quat.shape == (4,) else 0.0
        if not math.isfinite(norm) or norm == 0.0:
            raise ValueError(f"Pose rotation must be a non-zero quaternion: {self.rotation}")
        object.__setattr__(self, "timestamp", float(self.timestamp))
        object.__setattr__(self, "translation", translation)
        object.__setattr__(self, "rotation", tuple(float(v) for v in quat / norm))

    @classmethod
    def from_tum(cls, timestamp: float, tx: float, ty: float, tz: float,
                 qx: float, qy: float, qz: float, qw: float) -> "Pose":
        """Build a pose from TUM field order (scalar-last quaternion)."""
        return cls(timestamp=timestamp, translation=(tx, ty, tz), rotation=(qw, qx, qy, qz))

    def to_tum(self) -> tuple[float, ...]:
        """Return the pose in TUM field order: t tx ty tz qx qy qz qw."""
        w, x, y, z = self.rotation
        return (self.timestamp, *self.translation, x, y, z, w)


@dataclass(frozen=True)
class Trajectory:
    """
    Ordered sequence of poses with strictly increasing timestamps.

    Attributes:
        poses: The poses, oldest first
        frame_id: Whether this is an estimate or the ground truth
    """
    poses: tuple[Pose, ...]
    frame_id: FrameId = FrameId.ESTIMATE

    def __post_init__(self):
        poses = tuple(self.poses)
        if not poses:
            raise ValueError("Trajectory must contain at least one pose")
        for prev, cur in zip(poses, poses[1:]):
            if cur.timestamp <= prev.timestamp:
                raise ValueError(
                    f"Trajectory timestamps must be strictly increasing "
                    f"({prev.timestamp} then {cur.timestamp})"
                )
        object.__setattr__(self, "poses", poses)

    def __len__(self) -> int:
        return len(self.poses)

    @property
    def timestamps(self) -> np.ndarray:
        """Timestamps as a (N,) array."""
        return np.array([p.timestamp for p in self.poses], dtype=np.float64)

    @property
    def positions(self) -> np.ndarray:
        """Translations as a (N, 3) array."""
        return np.array([p.translation for p in self.poses], dtype=np.float64)

    def prefix(self, k: int) -> "Trajectory":
        """Return the first k poses (1 <= k <= len)."""
        if not 1 <= k <= len(self.poses):
            raise ValueError(f"Prefix length {k} outside [1, {len(self.poses)}]")
        return Trajectory(self.poses[:k], self.frame_id)

    def transformed(
        self,
        rotation: np.ndarray,
        translation: np.ndarray,
        scale: float = 1.0,
    ) -> "Trajectory":
        """
        Apply p -> scale * R p + t to every position.

        Orientations are left-multiplied by R as well, so the result is the
        same trajectory expressed in another world frame.
        """
        from scipy.spatial.transform import Rotation

        rot = Rotation.from_matrix(np.asarray(rotation, dtype=np.float64))
        t = np.asarray(translation, dtype=np.float64)
        new_positions = scale * self.positions @ rot.as_matrix().T + t
        poses = []
        for pose, position in zip(self.poses, new_positions):
            w, x, y, z = pose.rotation
            x2, y2, z2, w2 = (rot * Rotation.from_quat([x, y, z, w])).as_quat()
            poses.append(Pose(pose.timestamp, tuple(position), (w2, x2, y2, z2)))
        return Trajectory(tuple(poses), self.frame_id)


@dataclass(frozen=True)
class Association:
    """
    Monotone matching between estimate and ground-truth poses.

    Attributes:
        pairs: (estimate index, ground-truth index), increasing on both sides
        max_time_offset: Largest allowed timestamp difference in seconds
    """
    pairs: tuple[tuple[int, int], ...]
    max_time_offset: float

    def __post_init__(self):
        pairs = tuple((int(i), int(j)) for i, j in self.pairs)
        for (i0, j0), (i1, j1) in zip(pairs, pairs[1:]):
            if not (i1 > i0 and j1 > j0):
                raise ValueError("Association pairs must increase on both sides")
        object.__setattr__(self, "pairs", pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    @property
    def estimate_indices(self) -> np.ndarray:
        return np.array([i for i, _ in self.pairs], dtype=np.int64)

    @property
    def truth_indices(self) -> np.ndarray:
        return np.array([j for _, j in self.pairs], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class AlignmentResult:
    """
    Result of aligning estimate points onto ground truth: truth ≈ s R est + t.

    Attributes:
        rotation: 3x3 rotation matrix (det = +1)
        translation: 3-vector in meters
        scale: Positive scale; exactly 1 in SE3 mode
        mode: The alignment family used
    """
    rotation: np.ndarray
    translation: np.ndarray
    scale: float
    mode: AlignmentMode

    def __post_init__(self):
        rotation = np.array(self.rotation, dtype=np.float64).reshape(3, 3)
        translation = np.array(self.translation, dtype=np.float64).reshape(3)
        if abs(np.linalg.det(rotation) - 1.0) > 1e-9:
            raise ValueError("Alignment rotation must have determinant +1")
        if self.scale <= 0:
            raise ValueError(f"Alignment scale must be positive, got {self.scale}")
        if self.mode is AlignmentMode.SE3 and self.scale != 1.0:
            raise ValueError("SE3 alignment must have unit scale")
        rotation.setflags(write=False)
        translation.setflags(write=False)
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)
        object.__setattr__(self, "scale", float(self.scale))

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map (N, 3) estimate points into the ground-truth frame."""
        return self.scale * np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation


@dataclass(frozen=True)
class SubTrajectoryExample:
    """
    One training label: the ATE of the keyframe prefix [1, cutoff_k].

    Prefixes that cannot be aligned are kept with skipped=True and no ATE so
    the example count always equals the keyframe count.
    """
    sequence_id: str
    cutoff_k: int
    ate: Optional[float]
    skipped: bool = False
    skip_reason: Optional[str] = None
    timestamp: Optional[float] = None
    frame_range: tuple[int, int] = field(init=False)

    def __post_init__(self):
        if self.cutoff_k < 1:
            raise ValueError(f"cutoff_k must be >= 1, got {self.cutoff_k}")
        if self.skipped:
            if self.ate is not None:
                raise ValueError("Skipped examples carry no ATE")
        elif self.ate is None or not self.ate >= 0:
            raise ValueError(f"ATE must be non-negative, got {self.ate}")
        object.__setattr__(self, "frame_range", (1, self.cutoff_k))

    def to_dict(self) -> dict:
        """Convert to a flat dictionary (one CSV row)."""
        return {
            "sequence_id": self.sequence_id,
            "cutoff_k": self.cutoff_k,
            "ate": self.ate,
            "skipped": self.skipped,
            "skip_reason": self.skip_reason,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SubTrajectoryExample":
        skipped = bool(data.get("skipped", False))
        ate = data.get("ate")
        return cls(
            sequence_id=str(data["sequence_id"]),
            cutoff_k=int(data["cutoff_k"]),
            ate=None if skipped or ate is None else float(ate),
            skipped=skipped,
            skip_reason=data.get("skip_reason") or None,
            timestamp=None if data.get("timestamp") is None else float(data["timestamp"]),
        )
