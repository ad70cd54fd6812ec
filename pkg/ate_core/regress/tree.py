"""
CART regression tree.

Trees are grown greedily without recursion and stored as flat node arrays
(feature -1 marks a leaf). A split sends x <= threshold to the left child.
The best split of a node minimizes the summed squared error of its two
children, which is the weighted child variance up to the factor 1/n.
Candidate thresholds are midpoints between adjacent distinct sorted values.
Near-ties (within 1e-10 of the node error) go to the lowest feature index,
then to the lowest threshold.
"""

from dataclasses import dataclass
from typing import Any, Optional, Union

import numpy as np

from ..rng import derive_rng
from .base import Regressor
from .hyperparameters import Hyperparameters, TreeSettings, resolve_max_features
from .registry import register_regressor

LEAF = -1
TIE_TOLERANCE = 1e-10


@dataclass(frozen=True)
class TreeNode:
    """
    Read-only view of one node.

    Internal nodes carry feature_index, threshold and both children; leaves
    carry only the mean target and sample count.
    """
    prediction: float
    n_samples: int
    feature_index: Optional[int] = None
    threshold: Optional[float] = None
    left: Optional["TreeNode"] = None
    right: Optional["TreeNode"] = None

    @property
    def is_leaf(self) -> bool:
        return self.feature_index is None


@dataclass(frozen=True, eq=False)
class TreeArrays:
    """Flat node storage; node 0 is the root and children follow their parent."""
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_samples: np.ndarray

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature == LEAF))

    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] != LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of X."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.flatnonzero(self.feature[node] != LEAF)
        while rows.size:
            current = node[rows]
            go_left = X[rows, self.feature[current]] <= self.threshold[current]
            node[rows] = np.where(go_left, self.left[current], self.right[current])
            rows = rows[self.feature[node[rows]] != LEAF]
        return node

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> dict[str, list]:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
            "n_samples": self.n_samples.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, list]) -> "TreeArrays":
        return cls(
            feature=np.asarray(data["feature"], dtype=np.int64),
            threshold=np.asarray(data["threshold"], dtype=np.float64),
            left=np.asarray(data["left"], dtype=np.int64),
            right=np.asarray(data["right"], dtype=np.int64),
            value=np.asarray(data["value"], dtype=np.float64),
            n_samples=np.asarray(data["n_samples"], dtype=np.int64),
        )

    def to_node(self) -> TreeNode:
        """Nested TreeNode view of the whole tree."""
        views: dict[int, TreeNode] = {}
        for node in range(self.n_nodes - 1, -1, -1):
            if self.feature[node] == LEAF:
                views[node] = TreeNode(float(self.value[node]), int(self.n_samples[node]))
            else:
                views[node] = TreeNode(
                    prediction=float(self.value[node]),
                    n_samples=int(self.n_samples[node]),
                    feature_index=int(self.feature[node]),
                    threshold=float(self.threshold[node]),
                    left=views.pop(int(self.left[node])),
                    right=views.pop(int(self.right[node])),
                )
        return views[0]


def best_split(
    X: np.ndarray, y: np.ndarray, features: np.ndarray, min_samples_leaf: int = 1
) -> Optional[tuple[int, float, float]]:
    """
    Best (feature, threshold, children SSE) over the given features.

    Args:
        X: (n, d) node samples
        y: (n,) node targets
        features: Ascending candidate feature indices
        min_samples_leaf: Minimum samples on each side

    Returns:
        The split, or None when no candidate split is valid
    """
    n = y.shape[0]
    if n < 2 * min_samples_leaf or n < 2:
        return None
    yc = y - y.mean()
    columns = X[:, features]
    order = np.argsort(columns, axis=0, kind="stable")
    xs = np.take_along_axis(columns, order, axis=0)
    ys = yc[order]

    total = yc.sum()
    total_sq = float(np.dot(yc, yc))
    left_sum = np.cumsum(ys, axis=0)[:-1]
    left_sq = np.cumsum(ys * ys, axis=0)[:-1]
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    sse = (left_sq - left_sum**2 / n_left) + (
        (total_sq - left_sq) - (total - left_sum) ** 2 / n_right
    )
    valid = (xs[1:] > xs[:-1]) & (n_left >= min_samples_leaf) & (n_right >= min_samples_leaf)
    if not valid.any():
        return None
    sse = np.where(valid, sse, np.inf)
    best = float(sse.min())
    near = valid & (sse <= best + TIE_TOLERANCE * max(total_sq, np.finfo(float).tiny))
    column = int(np.flatnonzero(near.any(axis=0))[0])
    row = int(np.flatnonzero(near[:, column])[0])
    lo, hi = xs[row, column], xs[row + 1, column]
    threshold = float(lo + (hi - lo) / 2.0)
    if not lo <= threshold < hi:
        threshold = float(lo)
    return int(features[column]), threshold, float(sse[row, column])


def grow_tree(
    X: np.ndarray, y: np.ndarray, settings: TreeSettings, rng: np.random.Generator
) -> TreeArrays:
    """
    Grow one CART tree.

    Candidate features at each node are a random subset of size given by the
    max_features rule. If none of them can split the node, further disjoint
    subsets are drawn from the same permutation before the node becomes a leaf.
    """
    n_total, width = X.shape
    n_candidates = resolve_max_features(settings.max_features, width)
    feature, threshold, left, right, value, counts = [], [], [], [], [], []

    def new_node(indices: np.ndarray) -> int:
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(float(y[indices].mean()))
        counts.append(int(indices.shape[0]))
        return len(feature) - 1

    stack = [(new_node(np.arange(n_total)), np.arange(n_total), 0)]
    while stack:
        node, indices, depth = stack.pop()
        n = indices.shape[0]
        node_y = y[indices]
        if (
            (settings.max_depth is not None and depth >= settings.max_depth)
            or n < settings.min_samples_split
            or n < 2 * settings.min_samples_leaf
            or node_y.max() == node_y.min()
        ):
            continue

        node_X = X[indices]
        if n_candidates >= width:
            chunks = [np.arange(width)]
        else:
            permutation = rng.permutation(width)
            chunks = [
                np.sort(permutation[start:start + n_candidates])
                for start in range(0, width, n_candidates)
            ]
        split = None
        for chunk in chunks:
            split = best_split(node_X, node_y, chunk, settings.min_samples_leaf)
            if split is not None:
                break
        if split is None:
            continue

        f, t, _ = split
        goes_left = node_X[:, f] <= t
        left_indices, right_indices = indices[goes_left], indices[~goes_left]
        feature[node] = f
        threshold[node] = t
        left[node] = new_node(left_indices)
        right[node] = new_node(right_indices)
        stack.append((right[node], right_indices, depth + 1))
        stack.append((left[node], left_indices, depth + 1))

    return TreeArrays(
        feature=np.asarray(feature, dtype=np.int64),
        threshold=np.asarray(threshold, dtype=np.float64),
        left=np.asarray(left, dtype=np.int64),
        right=np.asarray(right, dtype=np.int64),
        value=np.asarray(value, dtype=np.float64),
        n_samples=np.asarray(counts, dtype=np.int64),
    )


def _as_settings(settings: Union[TreeSettings, Hyperparameters, None]) -> TreeSettings:
    if settings is None:
        return TreeSettings()
    if isinstance(settings, Hyperparameters):
        return settings.tree_settings()
    return settings


@register_regressor("tree")
class DecisionTreeRegressor(Regressor):
    """Single CART tree with mean-valued leaves."""

    def __init__(self, settings: Union[TreeSettings, Hyperparameters, None] = None,
                 rng_seed: int = 0):
        super().__init__()
        self.settings = _as_settings(settings)
        self.rng_seed = rng_seed
        self.arrays: Optional[TreeArrays] = None

    def fit(self, X: np.ndarray, y: np.ndarray) -> "DecisionTreeRegressor":
        X, y = self._check_training(X, y, min_examples=1)
        return super().fit(X, y)

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        self.arrays = grow_tree(X, y, self.settings, derive_rng(self.rng_seed, "tree-features"))

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return self.arrays.predict(X)

    @property
    def root(self) -> TreeNode:
        if self.arrays is None:
            raise RuntimeError("tree model is not fitted")
        return self.arrays.to_node()

    def _params_dict(self) -> dict[str, Any]:
        return {
            "settings": {
                "max_depth": self.settings.max_depth,
                "min_samples_split": self.settings.min_samples_split,
                "min_samples_leaf": self.settings.min_samples_leaf,
                "max_features": self.settings.max_features,
            },
            "rng_seed": self.rng_seed,
            "tree": self.arrays.to_dict(),
        }

    @classmethod
    def _from_params(cls, params: dict[str, Any]) -> "DecisionTreeRegressor":
        model = cls(TreeSettings(**params["settings"]), int(params["rng_seed"]))
        model.arrays = TreeArrays.from_dict(params["tree"])
        return model
