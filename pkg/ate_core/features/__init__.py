"""
Features module: datasets, collinearity pruning and sequence-respecting splits.
"""

from .assemble import build_dataset, build_examples, prefix_frame_count
from .correlation import (
    DEFAULT_PMCC_THRESHOLD,
    Correlation,
    apply_mask,
    correlation_matrix,
    decorrelate,
    mask_vector,
    pearson,
)
from .io import load_dataset, load_mask, save_dataset, save_mask
from .split import sequence_blocks, sequence_folds, sequential_split
from .types import Dataset, Example, FeatureMask

__all__ = [
    "Correlation",
    "Dataset",
    "Example",
    "FeatureMask",
    "DEFAULT_PMCC_THRESHOLD",
    "apply_mask",
    "build_dataset",
    "build_examples",
    "correlation_matrix",
    "decorrelate",
    "load_dataset",
    "load_mask",
    "mask_vector",
    "pearson",
    "prefix_frame_count",
    "save_dataset",
    "save_mask",
    "sequence_blocks",
    "sequence_folds",
    "sequential_split",
]
