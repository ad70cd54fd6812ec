"""
Type definitions for sensor frames and characterization matrices.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

MIN_IMAGE_SIDE = 8


class Modality(Enum):
    """Sensor modality a characterization metric reads."""
    IMAGE = "image"
    IMU = "imu"


@dataclass(frozen=True, eq=False)
class Frame:
    """
    One measurement of a sequence.

    Attributes:
        timestamp: Seconds
        pixels: 2-D uint8 grayscale image, or None
        imu_window: (S, 6) samples [gx gy gz ax ay az] recorded since the
                    previous frame, or None
    """
    timestamp: float
    pixels: Optional[np.ndarray] = None
    imu_window: Optional[np.ndarray] = None

    def __post_init__(self):
        pixels = self.pixels
        if pixels is not None:
            pixels = np.asarray(pixels)
            if pixels.ndim != 2:
                raise ValueError(f"Frame pixels must be 2-D, got shape {pixels.shape}")
            if min(pixels.shape) < MIN_IMAGE_SIDE:
                raise ValueError(
                    f"Frame image must be at least {MIN_IMAGE_SIDE}x{MIN_IMAGE_SIDE}, "
                    f"got {pixels.shape}"
                )
            if pixels.dtype != np.uint8:
                if pixels.min() < 0 or pixels.max() > 255:
                    raise ValueError("Frame pixels must be 8-bit intensities")
                pixels = pixels.astype(np.uint8)
            pixels = pixels.copy()
            pixels.setflags(write=False)
        imu = self.imu_window
        if imu is not None:
            imu = np.array(imu, dtype=np.float64).reshape(-1, 6)
            imu.setflags(write=False)
        if pixels is None and imu is None:
            raise ValueError("Frame needs an image or an IMU window")
        object.__setattr__(self, "pixels", pixels)
        object.__setattr__(self, "imu_window", imu)

    def has(self, modality: Modality) -> bool:
        """Whether the frame carries usable data for a modality."""
        if modality is Modality.IMAGE:
            return self.pixels is not None
        return self.imu_window is not None and self.imu_window.shape[0] > 0


@dataclass(frozen=True, eq=False)
class FrameCharacterization:
    """Metric values of one frame plus which of them were actually measured."""
    values: np.ndarray
    coverage: np.ndarray


@dataclass(frozen=True, eq=False)
class CharacterizationMatrix:
    """
    m metrics x n frames matrix describing a (sub-)sequence.

    Attributes:
        values: (m, n) finite matrix; column j describes frame j
        metric_names: Row labels, length m
        sequence_id: Source sequence
        coverage: (m, n) booleans, False where a neutral value stands in for
                  a missing modality
        timestamps: (n,) frame timestamps
    """
    values: np.ndarray
    metric_names: tuple[str, ...]
    sequence_id: str
    coverage: Optional[np.ndarray] = None
    timestamps: Optional[np.ndarray] = field(default=None)

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64)
        if values.ndim != 2:
            raise ValueError(f"Characterization matrix must be 2-D, got {values.shape}")
        names = tuple(self.metric_names)
        if values.shape[0] != len(names):
            raise ValueError(
                f"Matrix has {values.shape[0]} rows but {len(names)} metric names"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError("Characterization matrix entries must be finite")
        coverage = self.coverage
        if coverage is None:
            coverage = np.ones(values.shape, dtype=bool)
        coverage = np.array(coverage, dtype=bool).reshape(values.shape)
        timestamps = self.timestamps
        if timestamps is not None:
            timestamps = np.array(timestamps, dtype=np.float64).reshape(values.shape[1])
            timestamps.setflags(write=False)
        values.setflags(write=False)
        coverage.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "metric_names", names)
        object.__setattr__(self, "coverage", coverage)
        object.__setattr__(self, "timestamps", timestamps)

    @property
    def n_metrics(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]

    def prefix(self, n: int) -> "CharacterizationMatrix":
        """Matrix of the first n frames (columns are frame-independent)."""
        if not 1 <= n <= self.n_frames:
            raise ValueError(f"Prefix length {n} outside [1, {self.n_frames}]")
        return CharacterizationMatrix(
            values=self.values[:, :n],
            metric_names=self.metric_names,
            sequence_id=self.sequence_id,
            coverage=self.coverage[:, :n],
            timestamps=None if self.timestamps is None else self.timestamps[:n],
        )
