"""
Ordinary least squares with intercept.

The design is centred and solved with an SVD-based least-squares solver, so
rank-deficient designs (e.g. constant or duplicated columns) resolve to the
minimum-norm coefficients and the intercept absorbs constant columns.
"""

from typing import Any

import numpy as np

from .base import Regressor
from .registry import register_regressor


@register_regressor("linear")
class LinearRegressor(Regressor):
    """Linear model y = X @ coefficients + intercept."""

    def __init__(self):
        super().__init__()
        self.coefficients = np.zeros(0)
        self.intercept: float = 0.0

    def fit(self, X: np.ndarray, y: np.ndarray) -> "LinearRegressor":
        X, y = self._check_training(X, y, min_examples=2)
        return super().fit(X, y)

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        x_mean = X.mean(axis=0)
        y_mean = float(y.mean())
        coefficients, *_ = np.linalg.lstsq(X - x_mean, y - y_mean, rcond=None)
        self.coefficients = coefficients
        self.intercept = y_mean - float(x_mean @ coefficients)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return X @ self.coefficients + self.intercept

    def _params_dict(self) -> dict[str, Any]:
        return {"coefficients": self.coefficients.tolist(), "intercept": self.intercept}

    @classmethod
    def _from_params(cls, params: dict[str, Any]) -> "LinearRegressor":
        model = cls()
        model.coefficients = np.asarray(params["coefficients"], dtype=np.float64)
        model.intercept = float(params["intercept"])
        return model
