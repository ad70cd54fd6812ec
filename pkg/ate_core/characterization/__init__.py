"""
Characterization module: per-frame metrics and characterization matrices.

This module turns raw frames (grayscale images and/or IMU windows) into the
m x n characterization matrix of a sequence.
"""

from .base import CharacterizationMetric
from .image_metrics import (
    Brightness,
    Contrast,
    GradientMagnitude,
    ImageEntropy,
    LaplacianSharpness,
    OverExposure,
    UnderExposure,
)
from .imu_metrics import AccelMean, GyroMean, GyroStd
from .io import decode_image, load_matrix, load_sequence, save_matrix
from .registry import DEFAULT_METRICS, MetricRegistry, register_metric
from .sequence import characterize_frame, characterize_sequence, resolve_metrics
from .types import CharacterizationMatrix, Frame, FrameCharacterization, Modality

__all__ = [
    "CharacterizationMetric",
    "Brightness",
    "Contrast",
    "ImageEntropy",
    "LaplacianSharpness",
    "GradientMagnitude",
    "UnderExposure",
    "OverExposure",
    "GyroMean",
    "AccelMean",
    "GyroStd",
    "DEFAULT_METRICS",
    "MetricRegistry",
    "register_metric",
    "CharacterizationMatrix",
    "Frame",
    "FrameCharacterization",
    "Modality",
    "characterize_frame",
    "characterize_sequence",
    "resolve_metrics",
    "decode_image",
    "load_sequence",
    "load_matrix",
    "save_matrix",
]
