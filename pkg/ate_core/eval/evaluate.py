"""
Model evaluation on held-out datasets.
"""

import logging
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import InsufficientDataError, UndefinedMetricError
from ..features.types import Dataset
from ..regress.base import Regressor
from ..regress.persistence import ModelBundle
from . import metrics
from .report import EvalReport, PredictionRecord

logger = logging.getLogger(__name__)


def report_from_predictions(
    y: Sequence[float],
    yhat: Sequence[float],
    sequence_ids: Optional[Sequence[str]] = None,
    cutoffs: Optional[Sequence[int]] = None,
    **metadata,
) -> EvalReport:
    """
    Build an EvalReport from targets and predictions.

    Zero targets are left out of MAPE and counted in mape_excluded. With
    constant targets R2 is 1 for a perfect prediction; otherwise the report
    carries the error and is failed.
    """
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    yhat = np.asarray(yhat, dtype=np.float64).reshape(-1)
    if y.size == 0:
        raise ValueError("Cannot evaluate on an empty test set")
    errors: list[str] = []

    try:
        r2_value: Optional[float] = metrics.r2(y, yhat)
    except (UndefinedMetricError, InsufficientDataError) as exc:
        if np.array_equal(y, yhat):
            r2_value = 1.0
        else:
            r2_value = None
            errors.append(str(exc))

    nonzero = y != 0
    mape_excluded = int(np.count_nonzero(~nonzero))
    if nonzero.any():
        mape_value: Optional[float] = metrics.mape(y[nonzero], yhat[nonzero])
    else:
        mape_value = None
        errors.append("MAPE is undefined: every target is zero")
    if mape_excluded:
        logger.warning("%d zero-ATE targets excluded from MAPE", mape_excluded)

    ids = list(sequence_ids) if sequence_ids is not None else [""] * y.size
    ks = list(cutoffs) if cutoffs is not None else list(range(1, y.size + 1))
    return EvalReport(
        r2=r2_value,
        mape=mape_value,
        mae=metrics.mae(y, yhat),
        rmse=metrics.rmse(y, yhat),
        n=int(y.size),
        mape_excluded=mape_excluded,
        error="; ".join(errors) or None,
        predictions=[
            PredictionRecord(str(s), int(k), float(t), float(p))
            for s, k, t, p in zip(ids, ks, y, yhat)
        ],
        **metadata,
    )


def evaluate(
    model: Union[ModelBundle, Regressor], test: Dataset, **metadata
) -> EvalReport:
    """
    Evaluate a model on a test dataset.

    Args:
        model: Bundle (raw or masked test width) or bare regressor (its own width)
        test: Non-empty test dataset
        **metadata: testcase_id, pooling_kind, train_fraction, model_kind, partition_hash

    Returns:
        EvalReport with all four metrics and the failed flag
    """
    if len(test) == 0:
        raise ValueError("Cannot evaluate on an empty test set")
    yhat = model.predict(test.X)
    metadata.setdefault("testcase_id", test.testcase_id)
    if "model_kind" not in metadata:
        regressor = model.regressor if isinstance(model, ModelBundle) else model
        metadata["model_kind"] = regressor.name
    report = report_from_predictions(test.y, yhat, test.sequence_ids, test.cutoffs, **metadata)
    logger.info(
        "%s %s: R2=%s MAPE=%s n=%d%s",
        report.testcase_id or "test", report.model_kind,
        "-" if report.r2 is None else f"{report.r2:.4f}",
        "-" if report.mape is None else f"{report.mape:.4f}",
        report.n, " FAILED" if report.failed else "",
    )
    return report
