"""
Collinearity pruning with the Pearson product-moment correlation.

Features are scanned in index order. A feature joins the group of the first
kept feature it correlates with above the threshold (in absolute value) and
otherwise becomes a kept feature itself.
"""

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ..errors import InsufficientDataError
from .types import Dataset, FeatureMask

logger = logging.getLogger(__name__)

DEFAULT_PMCC_THRESHOLD = 0.95


@dataclass(frozen=True)
class Correlation:
    """PMCC of two vectors; degenerate when either has zero variance."""
    coefficient: float
    degenerate: bool = False

    def __float__(self) -> float:
        return self.coefficient


def _constant_columns(X: np.ndarray) -> np.ndarray:
    scale = np.maximum(1.0, np.abs(X).max(axis=0))
    return X.std(axis=0) <= 1e-12 * scale


def pearson(a: Sequence[float], b: Sequence[float]) -> Correlation:
    """
    Pearson correlation of two equal-length vectors.

    Args:
        a: First vector (length >= 2)
        b: Second vector, same length

    Returns:
        Correlation in [-1, 1]; 0 with degenerate=True when either vector is constant
    """
    a = np.asarray(a, dtype=np.float64).reshape(-1)
    b = np.asarray(b, dtype=np.float64).reshape(-1)
    if a.shape != b.shape:
        raise ValueError(f"Length mismatch: {a.size} vs {b.size}")
    if a.size < 2:
        raise InsufficientDataError("PMCC needs at least two samples")
    if _constant_columns(np.column_stack([a, b])).any():
        return Correlation(0.0, degenerate=True)
    da = a - a.mean()
    db = b - b.mean()
    r = float(np.dot(da, db) / np.sqrt(np.dot(da, da) * np.dot(db, db)))
    return Correlation(float(np.clip(r, -1.0, 1.0)))


def correlation_matrix(X: np.ndarray) -> np.ndarray:
    """Absolute PMCC between all column pairs; constant columns correlate with nothing."""
    X = np.asarray(X, dtype=np.float64)
    d = X.shape[1]
    result = np.zeros((d, d))
    live = np.flatnonzero(~_constant_columns(X))
    if live.size:
        sub = np.atleast_2d(np.corrcoef(X[:, live], rowvar=False))
        result[np.ix_(live, live)] = np.abs(np.clip(sub, -1.0, 1.0))
    return result


def decorrelate(dataset: Dataset, threshold: float = DEFAULT_PMCC_THRESHOLD) -> FeatureMask:
    """
    Compute the feature mask of a (training) dataset.

    Zero-variance features are dropped first. If every feature is constant,
    feature 0 is kept so the mask is never empty.

    Args:
        dataset: Dataset with at least two examples
        threshold: |PMCC| above which two features are considered collinear

    Returns:
        FeatureMask over the dataset layout
    """
    if len(dataset) < 2:
        raise InsufficientDataError("decorrelate needs at least two examples")
    if not 0 < threshold <= 1:
        raise ValueError(f"threshold must be in (0, 1], got {threshold}")
    X = dataset.X
    constant = _constant_columns(X)
    corr = correlation_matrix(X)

    keepers: list[int] = []
    members: dict[int, list[int]] = {}
    for j in np.flatnonzero(~constant):
        j = int(j)
        owner = next((k for k in keepers if corr[k, j] > threshold), None)
        if owner is None:
            keepers.append(j)
            members[j] = [j]
        else:
            members[owner].append(j)

    dropped_constant = tuple(int(i) for i in np.flatnonzero(constant))
    if not keepers:
        logger.warning("All %d features are constant; keeping feature 0", dataset.width)
        keepers = [0]
        dropped_constant = tuple(i for i in dropped_constant if i != 0)

    groups = tuple(tuple(g) for g in members.values() if len(g) >= 2)
    logger.info(
        "Decorrelation kept %d of %d features (%d groups, %d constant)",
        len(keepers), dataset.width, len(groups), len(dropped_constant),
    )
    return FeatureMask(
        kept_indices=tuple(keepers),
        groups=groups,
        threshold=threshold,
        width=dataset.width,
        feature_names=dataset.feature_names,
        dropped_constant=dropped_constant,
    )


def apply_mask(dataset: Dataset, mask: FeatureMask) -> Dataset:
    """
    Project a dataset onto the kept features of a mask.

    A dataset already carrying exactly the kept feature names is returned
    unchanged, so masking twice is the same as masking once.
    """
    if mask.kept_names and dataset.feature_names == mask.kept_names:
        return dataset
    if dataset.width != mask.width:
        raise IndexError(
            f"Mask built for width {mask.width} cannot be applied to width {dataset.width}"
        )
    return dataset.with_features(mask.kept_indices)


def mask_vector(values: np.ndarray, mask: FeatureMask) -> np.ndarray:
    """Apply a mask to a raw descriptor vector (or an (N, d) matrix)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape[-1] != mask.width:
        raise IndexError(f"Expected width {mask.width}, got {values.shape[-1]}")
    return values[..., list(mask.kept_indices)]
