"""
Image characterization metrics for 8-bit grayscale frames.

Brightness and contrast are the intensity mean and (population) standard
deviation; entropy is the Shannon entropy of the 256-bin histogram in bits;
sharpness is the variance of the 3x3 Laplacian response with zero-padded
borders; exposure metrics are the fractions of clipped pixels.
"""

import cv2
import numpy as np
from scipy.stats import entropy

from .base import CharacterizationMetric
from .registry import register_metric
from .types import Frame, Modality

UNDEREXPOSED_LEVEL = 10
OVEREXPOSED_LEVEL = 245


def _gray(frame: Frame) -> np.ndarray:
    return frame.pixels.astype(np.float64)


class ImageMetric(CharacterizationMetric):
    """Base for metrics reading the frame image."""
    modality = Modality.IMAGE


@register_metric("brightness")
class Brightness(ImageMetric):
    """Mean intensity in [0, 255]."""

    def compute(self, frame: Frame) -> float:
        return float(np.mean(_gray(frame)))


@register_metric("contrast")
class Contrast(ImageMetric):
    """Intensity standard deviation in [0, 127.5]."""

    def compute(self, frame: Frame) -> float:
        return float(np.std(_gray(frame)))


@register_metric("image_entropy")
class ImageEntropy(ImageMetric):
    """Shannon entropy of the intensity histogram, in bits (0..8)."""

    def compute(self, frame: Frame) -> float:
        counts = np.bincount(frame.pixels.ravel(), minlength=256)
        return float(entropy(counts, base=2))


@register_metric("laplacian_variance")
class LaplacianSharpness(ImageMetric):
    """Variance of the Laplacian response; low values indicate blur."""

    def compute(self, frame: Frame) -> float:
        # ksize=1 selects the [[0,1,0],[1,-4,1],[0,1,0]] aperture
        response = cv2.Laplacian(
            _gray(frame), cv2.CV_64F, ksize=1, borderType=cv2.BORDER_CONSTANT
        )
        return float(response.var())


@register_metric("gradient_magnitude")
class GradientMagnitude(ImageMetric):
    """Mean gradient magnitude from central differences."""

    def compute(self, frame: Frame) -> float:
        gy, gx = np.gradient(_gray(frame))
        return float(np.mean(np.hypot(gx, gy)))


@register_metric("underexposure")
class UnderExposure(ImageMetric):
    """Fraction of pixels at or below the under-exposure level."""

    def compute(self, frame: Frame) -> float:
        return float(np.mean(frame.pixels <= UNDEREXPOSED_LEVEL))


@register_metric("overexposure")
class OverExposure(ImageMetric):
    """Fraction of pixels at or above the over-exposure level."""

    def compute(self, frame: Frame) -> float:
        return float(np.mean(frame.pixels >= OVEREXPOSED_LEVEL))
