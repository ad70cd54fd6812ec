"""
Dataset types: labelled descriptors, datasets and feature masks.
"""

import hashlib
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from ..pooling.types import Descriptor


@dataclass(frozen=True)
class Example:
    """
    One (descriptor, ATE) pair with its provenance.

    Attributes:
        descriptor: Pooled features of the sub-sequence
        ate: ATE label in meters
        sequence_id: Source sequence
        cutoff_k: Keyframe count of the sub-trajectory
    """
    descriptor: Descriptor
    ate: float
    sequence_id: str
    cutoff_k: int

    def __post_init__(self):
        if not self.ate >= 0:
            raise ValueError(f"Example ATE must be non-negative, got {self.ate}")
        object.__setattr__(self, "ate", float(self.ate))
        object.__setattr__(self, "cutoff_k", int(self.cutoff_k))


@dataclass(frozen=True, eq=False)
class Dataset:
    """
    Ordered examples sharing one feature layout.

    Attributes:
        examples: Examples, grouped by sequence in listed order
        feature_names: Shared descriptor labels
        testcase_id: "<mode>-<dataset>" label, e.g. "S-KITTI"
    """
    examples: tuple[Example, ...]
    feature_names: tuple[str, ...]
    testcase_id: str = ""
    _matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        examples = tuple(self.examples)
        names = tuple(self.feature_names)
        for ex in examples:
            if ex.descriptor.feature_names != names:
                raise ValueError(
                    f"Example {ex.sequence_id}@{ex.cutoff_k} does not match the dataset layout"
                )
        matrix = (
            np.vstack([ex.descriptor.values for ex in examples])
            if examples else np.empty((0, len(names)))
        )
        matrix.setflags(write=False)
        object.__setattr__(self, "examples", examples)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "_matrix", matrix)

    @classmethod
    def from_arrays(
        cls,
        X: np.ndarray,
        y: Sequence[float],
        sequence_ids: Sequence[str],
        cutoffs: Optional[Sequence[int]] = None,
        feature_names: Optional[Sequence[str]] = None,
        testcase_id: str = "",
    ) -> "Dataset":
        """Build a dataset from a feature matrix and parallel label arrays."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[:, None]
        names = tuple(feature_names) if feature_names is not None else tuple(
            f"f{i}" for i in range(X.shape[1])
        )
        if cutoffs is None:
            cutoffs = list(range(1, X.shape[0] + 1))
        examples = tuple(
            Example(Descriptor(row, names, f"{sid}@{k}"), float(t), str(sid), int(k))
            for row, t, sid, k in zip(X, y, sequence_ids, cutoffs)
        )
        return cls(examples, names, testcase_id)

    def __len__(self) -> int:
        return len(self.examples)

    @property
    def width(self) -> int:
        return len(self.feature_names)

    @property
    def X(self) -> np.ndarray:
        """(N, d) feature matrix (read-only)."""
        return self._matrix

    @property
    def y(self) -> np.ndarray:
        return np.array([ex.ate for ex in self.examples], dtype=np.float64)

    @property
    def sequence_ids(self) -> list[str]:
        return [ex.sequence_id for ex in self.examples]

    @property
    def cutoffs(self) -> list[int]:
        return [ex.cutoff_k for ex in self.examples]

    def sequences(self) -> list[str]:
        """Distinct sequence ids in order of first appearance."""
        return list(dict.fromkeys(self.sequence_ids))

    def subset(self, indices: Sequence[int]) -> "Dataset":
        """Examples at the given positions, order preserved as given."""
        return Dataset(tuple(self.examples[i] for i in indices), self.feature_names,
                       self.testcase_id)

    def with_features(self, indices: Sequence[int]) -> "Dataset":
        """Project every descriptor onto the given feature indices."""
        indices = list(indices)
        names = tuple(self.feature_names[i] for i in indices)
        examples = tuple(
            Example(
                Descriptor(ex.descriptor.values[indices], names, ex.descriptor.source_id),
                ex.ate, ex.sequence_id, ex.cutoff_k,
            )
            for ex in self.examples
        )
        return Dataset(examples, names, self.testcase_id)

    def fingerprint(self) -> str:
        """Digest of the example provenance (sequence, cutoff) in order."""
        digest = hashlib.sha256()
        for ex in self.examples:
            digest.update(f"{ex.sequence_id}\x1f{ex.cutoff_k}\x1e".encode("utf-8"))
        return digest.hexdigest()[:16]


@dataclass(frozen=True)
class FeatureMask:
    """
    Features retained after collinearity pruning.

    Attributes:
        kept_indices: Sorted indices into the original feature layout
        groups: Correlated groups (two or more members); the lowest index
                of each group is its kept member
        threshold: |PMCC| threshold used for grouping
        width: Width of the original layout
        feature_names: Original layout labels
        dropped_constant: Zero-variance features removed before grouping
    """
    kept_indices: tuple[int, ...]
    groups: tuple[tuple[int, ...], ...]
    threshold: float
    width: int
    feature_names: tuple[str, ...] = ()
    dropped_constant: tuple[int, ...] = ()

    def __post_init__(self):
        kept = tuple(sorted(int(i) for i in self.kept_indices))
        if not kept:
            raise ValueError("Feature mask must keep at least one feature")
        if not 0 < self.threshold <= 1:
            raise ValueError(f"Mask threshold must be in (0, 1], got {self.threshold}")
        if kept[0] < 0 or kept[-1] >= self.width:
            raise ValueError(f"Kept indices out of range for width {self.width}")
        groups = tuple(tuple(int(i) for i in g) for g in self.groups)
        kept_set = set(kept)
        for g in groups:
            if len(kept_set.intersection(g)) != 1:
                raise ValueError(f"Group {g} must contain exactly one kept feature")
        object.__setattr__(self, "kept_indices", kept)
        object.__setattr__(self, "groups", groups)
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "dropped_constant", tuple(int(i) for i in self.dropped_constant))

    @classmethod
    def identity(cls, width: int, feature_names: Sequence[str] = (),
                 threshold: float = 0.95) -> "FeatureMask":
        return cls(tuple(range(width)), (), threshold, width, tuple(feature_names))

    @property
    def kept_names(self) -> tuple[str, ...]:
        if not self.feature_names:
            return ()
        return tuple(self.feature_names[i] for i in self.kept_indices)

    @property
    def masked_width(self) -> int:
        return len(self.kept_indices)

    def to_dict(self) -> dict:
        """Convert to a JSON-friendly dictionary."""
        return {
            "threshold": self.threshold,
            "groups": [list(g) for g in self.groups],
            "kept_indices": list(self.kept_indices),
            "width": self.width,
            "feature_names": list(self.feature_names),
            "dropped_constant": list(self.dropped_constant),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FeatureMask":
        return cls(
            kept_indices=tuple(data["kept_indices"]),
            groups=tuple(tuple(g) for g in data.get("groups", [])),
            threshold=float(data["threshold"]),
            width=int(data["width"]),
            feature_names=tuple(data.get("feature_names", [])),
            dropped_constant=tuple(data.get("dropped_constant", [])),
        )
