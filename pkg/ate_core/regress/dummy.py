"""
Mean-of-targets baseline.
"""

from typing import Any

import numpy as np

from .base import Regressor
from .registry import register_regressor


@register_regressor("dummy")
class DummyRegressor(Regressor):
    """Predicts the mean training target for every input."""

    def __init__(self):
        super().__init__()
        self.constant: float = 0.0

    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        self.constant = float(np.mean(y))

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return np.full(X.shape[0], self.constant)

    def _params_dict(self) -> dict[str, Any]:
        return {"constant": self.constant}

    @classmethod
    def _from_params(cls, params: dict[str, Any]) -> "DummyRegressor":
        model = cls()
        model.constant = float(params["constant"])
        return model
