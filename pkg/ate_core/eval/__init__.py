"""
Eval module: regression metrics, failure detection, reports and baselines.
"""

from .baselines import ate_at_fraction_baseline, fraction_cutoff
from .evaluate import evaluate, report_from_predictions
from .metrics import is_failed, mae, mape, r2, rmse
from .report import (
    BaselineRow,
    BaselineTable,
    EvalReport,
    ModelComparison,
    PoolingComparison,
    PredictionRecord,
    SweepReport,
    SweepRow,
    partition_hash,
    render_table,
)

__all__ = [
    "BaselineRow",
    "BaselineTable",
    "EvalReport",
    "ModelComparison",
    "PoolingComparison",
    "PredictionRecord",
    "SweepReport",
    "SweepRow",
    "ate_at_fraction_baseline",
    "evaluate",
    "fraction_cutoff",
    "is_failed",
    "mae",
    "mape",
    "partition_hash",
    "r2",
    "render_table",
    "report_from_predictions",
    "rmse",
]
