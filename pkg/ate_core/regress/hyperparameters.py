"""
Random-forest hyperparameters and per-tree growth settings.
"""

import math
from dataclasses import dataclass
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

MaxFeatures = Literal["all", "sqrt", "log2"]

N_ESTIMATORS_RANGE = (10, 1000)
MAX_DEPTH_RANGE = (10, 100)
MIN_SAMPLES_SPLIT_CHOICES = (2, 5, 10)
MIN_SAMPLES_LEAF_CHOICES = (1, 2, 4)
MAX_FEATURES_CHOICES: tuple[MaxFeatures, ...] = ("all", "sqrt", "log2")


def resolve_max_features(rule: MaxFeatures, width: int) -> int:
    """Number of candidate features per split for a rule and a (masked) width."""
    if width < 1:
        raise ValueError(f"width must be positive, got {width}")
    if rule == "all":
        return width
    if rule == "sqrt":
        return max(1, int(math.sqrt(width)))
    if rule == "log2":
        return max(1, int(math.log2(width)))
    raise ValueError(f"Unknown max_features rule: {rule!r}")


@dataclass(frozen=True)
class TreeSettings:
    """
    Growth limits of a single CART tree.

    Unlike Hyperparameters these are unconstrained, so stumps and unbounded
    trees can be expressed. max_depth=None grows until the leaves are pure.
    """
    max_depth: Optional[int] = None
    min_samples_split: int = 2
    min_samples_leaf: int = 1
    max_features: MaxFeatures = "all"

    def __post_init__(self):
        if self.max_depth is not None and self.max_depth < 0:
            raise ValueError(f"max_depth must be >= 0, got {self.max_depth}")
        if self.min_samples_split < 2:
            raise ValueError(f"min_samples_split must be >= 2, got {self.min_samples_split}")
        if self.min_samples_leaf < 1:
            raise ValueError(f"min_samples_leaf must be >= 1, got {self.min_samples_leaf}")
        if self.max_features not in MAX_FEATURES_CHOICES:
            raise ValueError(f"Unknown max_features rule: {self.max_features!r}")


class Hyperparameters(BaseModel):
    """Tunable forest hyperparameters, each restricted to its search range."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_estimators: int = Field(default=100, ge=N_ESTIMATORS_RANGE[0], le=N_ESTIMATORS_RANGE[1])
    min_samples_split: Literal[2, 5, 10] = 2
    min_samples_leaf: Literal[1, 2, 4] = 1
    max_features: MaxFeatures = "all"
    max_depth: int = Field(default=100, ge=MAX_DEPTH_RANGE[0], le=MAX_DEPTH_RANGE[1])
    bootstrap: bool = True

    def tree_settings(self) -> TreeSettings:
        return TreeSettings(
            max_depth=self.max_depth,
            min_samples_split=self.min_samples_split,
            min_samples_leaf=self.min_samples_leaf,
            max_features=self.max_features,
        )
