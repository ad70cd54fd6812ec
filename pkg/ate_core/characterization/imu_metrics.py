"""
Inertial characterization metrics over the IMU samples of a frame.
"""

import numpy as np

from .base import CharacterizationMetric
from .registry import register_metric
from .types import Frame, Modality


class ImuMetric(CharacterizationMetric):
    """Base for metrics reading the frame's IMU window."""
    modality = Modality.IMU

    @staticmethod
    def gyro_norms(frame: Frame) -> np.ndarray:
        return np.linalg.norm(frame.imu_window[:, :3], axis=1)

    @staticmethod
    def accel_norms(frame: Frame) -> np.ndarray:
        return np.linalg.norm(frame.imu_window[:, 3:6], axis=1)


@register_metric("gyro_mean")
class GyroMean(ImuMetric):
    """Mean angular-rate magnitude (rad/s)."""

    def compute(self, frame: Frame) -> float:
        return float(np.mean(self.gyro_norms(frame)))


@register_metric("accel_mean")
class AccelMean(ImuMetric):
    """Mean specific-force magnitude (m/s^2)."""

    def compute(self, frame: Frame) -> float:
        return float(np.mean(self.accel_norms(frame)))


@register_metric("gyro_std")
class GyroStd(ImuMetric):
    """Standard deviation of the angular-rate magnitude."""

    def compute(self, frame: Frame) -> float:
        return float(np.std(self.gyro_norms(frame)))
