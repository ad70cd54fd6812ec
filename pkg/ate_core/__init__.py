"""
ATE Prediction Core - algorithm layer for predicting SLAM trajectory error.

This module provides everything needed to predict the absolute trajectory
error (ATE) a SLAM system will make on a sensor sequence, from the sequence
alone.

Core Components:
- trajectory: TUM trajectories, association, Umeyama alignment, ATE labels
- characterization: Per-frame image/IMU metrics and characterization matrices
- pooling: 1-D global pooling of matrices into fixed-size descriptors
- features: Datasets, PMCC collinearity pruning, sequence-respecting splits
- regress: Dummy/linear/tree/forest regressors, tuning, model persistence
- eval: Metrics, failure detection, reports and the ATE-at-fraction baseline
- synth: Synthetic corpus with a known ATE-vs-feature relationship
- experiment_runner: Train/evaluate, sweeps and comparisons

Dependencies:
- numpy, scipy, pandas, joblib, pydantic
- opencv-python-headless: image decoding and the Laplacian
"""

from .characterization import (
    CharacterizationMatrix,
    Frame,
    MetricRegistry,
    characterize_frame,
    characterize_sequence,
    load_sequence,
)
from .errors import AtePredictionError
from .eval import (
    EvalReport,
    SweepReport,
    ate_at_fraction_baseline,
    evaluate,
    mae,
    mape,
    r2,
    rmse,
)
from .experiment_runner import ExperimentRunner, TrainingResult
from .features import (
    Dataset,
    Example,
    FeatureMask,
    apply_mask,
    build_dataset,
    decorrelate,
    pearson,
    sequential_split,
)
from .pooling import Descriptor, PoolingFunction, PoolKind, pool, pool_kinds
from .regress import (
    Hyperparameters,
    ModelBundle,
    RandomForestRegressor,
    RegressorRegistry,
    fit_dummy,
    fit_forest,
    fit_linear,
    fit_tree,
    load_model,
    predict,
    save_model,
    tune,
)
from .trajectory import (
    AlignmentMode,
    OperatingMode,
    SubTrajectoryExample,
    Trajectory,
    align,
    associate,
    compute_ate,
    generate_subtrajectory_examples,
    load_trajectory,
)

__all__ = [
    # Trajectory
    "AlignmentMode",
    "OperatingMode",
    "SubTrajectoryExample",
    "Trajectory",
    "align",
    "associate",
    "compute_ate",
    "generate_subtrajectory_examples",
    "load_trajectory",
    # Characterization
    "CharacterizationMatrix",
    "Frame",
    "MetricRegistry",
    "characterize_frame",
    "characterize_sequence",
    "load_sequence",
    # Pooling
    "Descriptor",
    "PoolKind",
    "PoolingFunction",
    "pool",
    "pool_kinds",
    # Features
    "Dataset",
    "Example",
    "FeatureMask",
    "apply_mask",
    "build_dataset",
    "decorrelate",
    "pearson",
    "sequential_split",
    # Regress
    "Hyperparameters",
    "ModelBundle",
    "RandomForestRegressor",
    "RegressorRegistry",
    "fit_dummy",
    "fit_forest",
    "fit_linear",
    "fit_tree",
    "load_model",
    "predict",
    "save_model",
    "tune",
    # Eval
    "EvalReport",
    "SweepReport",
    "ate_at_fraction_baseline",
    "evaluate",
    "mae",
    "mape",
    "r2",
    "rmse",
    # Runner
    "ExperimentRunner",
    "TrainingResult",
    # Errors
    "AtePredictionError",
]

__version__ = "0.1.0"
