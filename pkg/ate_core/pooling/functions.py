"""
The eleven single pooling functions.

Statistical kinds use population moments. Diversity kinds bin the row into
an equal-width histogram over [row min, row max]; a constant row is one
full bin (entropy 0, Simpson 1). Skewness and kurtosis (excess) of a
constant row are defined as 0.
"""

import numpy as np
from scipy.stats import entropy, kurtosis, skew

from .registry import register_pool
from .types import PoolKind


def _is_constant(row: np.ndarray) -> bool:
    return row.size < 2 or row.max() == row.min()


def _is_flat(row: np.ndarray) -> bool:
    # moment ratios are numerically meaningless at this spread
    return _is_constant(row) or np.std(row) <= 1e-12 * max(1.0, float(np.abs(row).max()))


def histogram_proportions(row: np.ndarray, bins: int) -> np.ndarray:
    """
    Bin proportions of a row over its own range.

    Constant rows give [1.0]. So do rows whose range is too narrow for bins
    distinct float edges.
    """
    if _is_constant(row):
        return np.ones(1)
    edges = np.linspace(float(row.min()), float(row.max()), bins + 1)
    if np.any(edges[1:] <= edges[:-1]):
        return np.ones(1)
    counts, _ = np.histogram(row, bins=bins, range=(edges[0], edges[-1]))
    return counts / row.size


@register_pool(PoolKind.MEAN)
def pool_mean(row: np.ndarray, bins: int) -> float:
    return float(np.mean(row))


@register_pool(PoolKind.MEDIAN)
def pool_median(row: np.ndarray, bins: int) -> float:
    return float(np.median(row))


@register_pool(PoolKind.MIN)
def pool_min(row: np.ndarray, bins: int) -> float:
    return float(np.min(row))


@register_pool(PoolKind.MAX)
def pool_max(row: np.ndarray, bins: int) -> float:
    return float(np.max(row))


@register_pool(PoolKind.STD)
def pool_std(row: np.ndarray, bins: int) -> float:
    return float(np.std(row))


@register_pool(PoolKind.SKEWNESS)
def pool_skewness(row: np.ndarray, bins: int) -> float:
    if _is_flat(row):
        return 0.0
    return float(skew(row, bias=True))


@register_pool(PoolKind.KURTOSIS)
def pool_kurtosis(row: np.ndarray, bins: int) -> float:
    if _is_flat(row):
        return 0.0
    return float(kurtosis(row, fisher=True, bias=True))


@register_pool(PoolKind.SHANNON_ENTROPY)
def pool_shannon_entropy(row: np.ndarray, bins: int) -> float:
    """Shannon entropy of the row histogram in bits, in [0, log2(bins)]."""
    return float(entropy(histogram_proportions(row, bins), base=2))


@register_pool(PoolKind.SIMPSON)
def pool_simpson(row: np.ndarray, bins: int) -> float:
    """Simpson index: sum of squared bin proportions, in (0, 1]."""
    p = histogram_proportions(row, bins)
    return float(np.sum(p * p))


@register_pool(PoolKind.GINI_SIMPSON)
def pool_gini_simpson(row: np.ndarray, bins: int) -> float:
    return 1.0 - pool_simpson(row, bins)


@register_pool(PoolKind.INVERSE_SIMPSON)
def pool_inverse_simpson(row: np.ndarray, bins: int) -> float:
    return 1.0 / pool_simpson(row, bins)
