"""
Regression quality metrics.

MAPE is a fraction (0.10 means 10 %); percent formatting happens only when
reports are rendered.
"""

from typing import Sequence

import numpy as np

from ..errors import InsufficientDataError, UndefinedMetricError

ArrayLike = Sequence[float] | np.ndarray


def _pair(y: ArrayLike, yhat: ArrayLike, min_length: int = 1) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(y, dtype=np.float64).reshape(-1)
    yhat = np.asarray(yhat, dtype=np.float64).reshape(-1)
    if y.shape != yhat.shape:
        raise ValueError(f"Length mismatch: {y.size} targets vs {yhat.size} predictions")
    if y.size < min_length:
        raise InsufficientDataError(f"Metric needs at least {min_length} values, got {y.size}")
    return y, yhat


def r2(y: ArrayLike, yhat: ArrayLike) -> float:
    """Coefficient of determination 1 - SSE/SST."""
    y, yhat = _pair(y, yhat, min_length=2)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        raise UndefinedMetricError("R2 is undefined for constant targets")
    return 1.0 - float(np.sum((y - yhat) ** 2)) / ss_tot


def mape(y: ArrayLike, yhat: ArrayLike) -> float:
    """Mean absolute percentage error as a fraction."""
    y, yhat = _pair(y, yhat)
    if np.any(y == 0):
        raise UndefinedMetricError("MAPE is undefined for zero targets")
    return float(np.mean(np.abs(y - yhat) / np.abs(y)))


def mae(y: ArrayLike, yhat: ArrayLike) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.mean(np.abs(y - yhat)))


def rmse(y: ArrayLike, yhat: ArrayLike) -> float:
    y, yhat = _pair(y, yhat)
    return float(np.sqrt(np.mean((y - yhat) ** 2)))


def is_failed(r2_value: float | None, mape_value: float | None) -> bool:
    """Out-of-range rule: a regression fails unless R2 and MAPE both lie in [0, 1]."""
    if r2_value is None or mape_value is None:
        return True
    return not (0.0 <= r2_value <= 1.0 and 0.0 <= mape_value <= 1.0)
