"""
Type definitions for 1-D global pooling.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_HISTOGRAM_BINS = 10


class PoolKind(Enum):
    """
    The twelve pooling functions, in their fixed order.

    The first eleven reduce a row to one scalar; CONCAT_ALL concatenates
    all of them.
    """
    MEAN = "mean"
    MEDIAN = "median"
    MIN = "min"
    MAX = "max"
    STD = "std"
    SKEWNESS = "skewness"
    KURTOSIS = "kurtosis"
    SHANNON_ENTROPY = "shannon_entropy"
    SIMPSON = "simpson"
    GINI_SIMPSON = "gini_simpson"
    INVERSE_SIMPSON = "inverse_simpson"
    CONCAT_ALL = "concat_all"

    @property
    def is_diversity(self) -> bool:
        """Whether the kind works on a histogram of the row."""
        return self in _DIVERSITY

    @classmethod
    def parse(cls, value: "str | PoolKind") -> "PoolKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValueError(
                f"Unknown pooling kind {value!r}; choose one of "
                f"{', '.join(k.value for k in cls)}"
            ) from None


_DIVERSITY = frozenset({
    PoolKind.SHANNON_ENTROPY,
    PoolKind.SIMPSON,
    PoolKind.GINI_SIMPSON,
    PoolKind.INVERSE_SIMPSON,
})

SINGLE_KINDS: tuple[PoolKind, ...] = tuple(k for k in PoolKind if k is not PoolKind.CONCAT_ALL)


@dataclass(frozen=True)
class PoolingFunction:
    """A pooling kind plus its histogram resolution (diversity kinds only)."""
    kind: PoolKind = PoolKind.MEAN
    histogram_bins: int = DEFAULT_HISTOGRAM_BINS

    def __post_init__(self):
        object.__setattr__(self, "kind", PoolKind.parse(self.kind))
        if int(self.histogram_bins) < 1:
            raise ValueError(f"histogram_bins must be positive, got {self.histogram_bins}")
        object.__setattr__(self, "histogram_bins", int(self.histogram_bins))

    @property
    def components(self) -> tuple[PoolKind, ...]:
        """Single kinds this function applies, in output order."""
        if self.kind is PoolKind.CONCAT_ALL:
            return SINGLE_KINDS
        return (self.kind,)

    def output_width(self, n_metrics: int) -> int:
        return n_metrics * len(self.components)


@dataclass(frozen=True, eq=False)
class Descriptor:
    """
    Pooled fixed-length feature vector of one (sub-)sequence.

    Attributes:
        values: Finite 1-D vector
        feature_names: "<metric>:<pool>" labels parallel to values
        source_id: Identifier of the pooled matrix (e.g. "seq01@42")
    """
    values: np.ndarray
    feature_names: tuple[str, ...]
    source_id: str = ""

    def __post_init__(self):
        values = np.array(self.values, dtype=np.float64).reshape(-1)
        names = tuple(self.feature_names)
        if values.shape[0] != len(names):
            raise ValueError(
                f"Descriptor has {values.shape[0]} values but {len(names)} names"
            )
        if not np.all(np.isfinite(values)):
            raise ValueError(f"Descriptor {self.source_id!r} has non-finite entries")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "feature_names", names)

    def __len__(self) -> int:
        return self.values.shape[0]
