"""
Dataset-level entry points for fitting each model family.
"""

from typing import Optional, Union

from ..errors import InsufficientDataError
from ..features.types import Dataset
from .base import Regressor
from .dummy import DummyRegressor
from .forest import RandomForestRegressor
from .hyperparameters import Hyperparameters, TreeSettings
from .linear import LinearRegressor
from .registry import RegressorRegistry
from .tree import DecisionTreeRegressor


def _require(train: Dataset, n: int, what: str) -> None:
    if len(train) < n:
        raise InsufficientDataError(f"{what} needs at least {n} examples, got {len(train)}")


def fit_dummy(train: Dataset) -> DummyRegressor:
    _require(train, 1, "dummy model")
    return DummyRegressor().fit(train.X, train.y)


def fit_linear(train: Dataset) -> LinearRegressor:
    _require(train, 2, "linear model")
    return LinearRegressor().fit(train.X, train.y)


def fit_tree(
    train: Dataset,
    settings: Union[TreeSettings, Hyperparameters, None] = None,
    rng_seed: int = 0,
) -> DecisionTreeRegressor:
    """Fit one CART tree; the max_features rule of the settings picks split candidates."""
    _require(train, 1, "tree model")
    return DecisionTreeRegressor(settings, rng_seed).fit(train.X, train.y)


def fit_forest(
    train: Dataset,
    hp: Optional[Hyperparameters] = None,
    rng_seed: int = 0,
    n_jobs: int = 1,
) -> RandomForestRegressor:
    _require(train, 1, "forest model")
    return RandomForestRegressor(hp, rng_seed, n_jobs).fit(train.X, train.y)


def fit_model(
    kind: str,
    train: Dataset,
    hp: Optional[Hyperparameters] = None,
    rng_seed: int = 0,
    n_jobs: int = 1,
) -> Regressor:
    """Fit a registered model family by name."""
    if kind == "dummy":
        return fit_dummy(train)
    if kind == "linear":
        return fit_linear(train)
    if kind == "tree":
        return fit_tree(train, hp, rng_seed)
    if kind == "forest":
        return fit_forest(train, hp, rng_seed, n_jobs)
    return RegressorRegistry.create(kind).fit(train.X, train.y)
