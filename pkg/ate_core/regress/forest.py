"""
Bagged random forest of CART trees.

Tree t draws its bootstrap sample from derive_rng(seed, "bootstrap", t) and
its per-node feature subsets from derive_rng(seed, "features", t), so a tree
is the same whichever worker grows it and in whatever order.
"""

import logging
from typing import Any, Optional

import numpy as np
from joblib import Parallel, delayed

from ..rng import derive_rng
from .base import Regressor
from .hyperparameters import Hyperparameters
from .registry import register_regressor
from .tree import TreeArrays, TreeNode, grow_tree

logger = logging.getLogger(__name__)


def _grow_member(
    X: np.ndarray, y: np.ndarray, hp: Hyperparameters, rng_seed: int, index: int
) -> TreeArrays:
    n = X.shape[0]
    if hp.bootstrap:
        sample = derive_rng(rng_seed, "bootstrap", index).integers(0, n, size=n)
        X, y = X[sample], y[sample]
    return grow_tree(X, y, hp.tree_settings(), derive_rng(rng_seed, "features", index))


@register_regressor("forest")
class RandomForestRegressor(Regressor):
    """
    Mean of n_estimators independently grown trees.

    Attributes:
        hyperparameters: Forest hyperparameters
        rng_seed: Seed all per-tree streams derive from
        trees: Fitted trees in index order
    """

    def __init__(self, hyperparameters: Optional[Hyperparameters] = None, rng_seed: int = 0,
                 n_jobs: int = 1):
        super().__init__()
        self.hyperparameters = hyperparameters or Hyperparameters()
        self.rng_seed = rng_seed
        self.n_jobs = n_jobs
        self.trees: list[TreeArrays] = []

    def fit(self, X: np.ndarray, y: np.ndarray) -> "RandomForestRegressor":
        X, y = self._check_training(X, y, min_examples=1)
        return super().fit(X, y)

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        hp = self.hyperparameters
        self.trees = Parallel(n_jobs=self.n_jobs)(
            delayed(_grow_member)(X, y, hp, self.rng_seed, t) for t in range(hp.n_estimators)
        )
        logger.debug(
            "Grew %d trees on %d examples (mean %.1f nodes)",
            len(self.trees), X.shape[0], np.mean([t.n_nodes for t in self.trees]),
        )

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return np.mean([tree.predict(X) for tree in self.trees], axis=0)

    @property
    def roots(self) -> list[TreeNode]:
        return [tree.to_node() for tree in self.trees]

    def _params_dict(self) -> dict[str, Any]:
        return {
            "hyperparameters": self.hyperparameters.model_dump(),
            "rng_seed": self.rng_seed,
            "trees": [tree.to_dict() for tree in self.trees],
        }

    @classmethod
    def _from_params(cls, params: dict[str, Any]) -> "RandomForestRegressor":
        model = cls(Hyperparameters(**params["hyperparameters"]), int(params["rng_seed"]))
        model.trees = [TreeArrays.from_dict(t) for t in params["trees"]]
        if len(model.trees) != model.hyperparameters.n_estimators:
            raise ValueError(
                f"Forest holds {len(model.trees)} trees, expected "
                f"{model.hyperparameters.n_estimators}"
            )
        return model
