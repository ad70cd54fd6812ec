"""
Regress module: baselines, CART trees, random forests and tuning.
"""

from .base import Regressor
from .dummy import DummyRegressor
from .fitting import fit_dummy, fit_forest, fit_linear, fit_model, fit_tree
from .forest import RandomForestRegressor
from .hyperparameters import Hyperparameters, TreeSettings, resolve_max_features
from .linear import LinearRegressor
from .persistence import ModelBundle, load_model, predict, save_model
from .registry import RegressorRegistry, register_regressor
from .tree import DecisionTreeRegressor, TreeArrays, TreeNode, best_split, grow_tree
from .tuning import CvReport, sample_candidates, select_best, tune

__all__ = [
    "CvReport",
    "DecisionTreeRegressor",
    "DummyRegressor",
    "Hyperparameters",
    "LinearRegressor",
    "ModelBundle",
    "RandomForestRegressor",
    "Regressor",
    "RegressorRegistry",
    "TreeArrays",
    "TreeNode",
    "TreeSettings",
    "best_split",
    "fit_dummy",
    "fit_forest",
    "fit_linear",
    "fit_model",
    "fit_tree",
    "grow_tree",
    "load_model",
    "predict",
    "register_regressor",
    "resolve_max_features",
    "sample_candidates",
    "save_model",
    "select_best",
    "tune",
]
