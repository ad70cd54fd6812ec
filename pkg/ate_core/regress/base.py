"""
Base regressor abstraction.

Every model maps an (N, d) feature matrix to N real
predictions and can be written to and read from a JSON-friendly dictionary.
"""

from abc import ABC, abstractmethod
from typing import Any, Optional

import numpy as np

from ..errors import InsufficientDataError, WidthMismatchError


class Regressor(ABC):
    """
    Abstract base class for regression models.

    Design Principles:
    - fit() returns self and freezes the model; a fitted model is never mutated
    - predict() is a pure function of the input rows
    - to_dict()/from_dict() round-trip to bit-identical predictions
    """

    name: str = "regressor"

    def __init__(self):
        self._n_features: Optional[int] = None

    @property
    def is_fitted(self) -> bool:
        return self._n_features is not None

    @property
    def n_features(self) -> int:
        if self._n_features is None:
            raise RuntimeError(f"{self.name} model is not fitted")
        return self._n_features

    def fit(self, X: np.ndarray, y: np.ndarray) -> "Regressor":
        """
        Fit the model.

        Args:
            X: (N, d) feature matrix
            y: (N,) targets

        Returns:
            self
        """
        if self.is_fitted:
            raise RuntimeError(f"{self.name} model is already fitted")
        X, y = self._check_training(X, y)
        self._fit(X, y)
        self._n_features = X.shape[1]
        return self

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Predict every row of an (N, d) matrix (a 1-D input is one row)."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.n_features:
            raise WidthMismatchError(
                f"{self.name} model expects width {self.n_features}, got {X.shape[1]}"
            )
        return self._predict(X)

    @abstractmethod
    def _fit(self, X: np.ndarray, y: np.ndarray) -> None:
        pass

    @abstractmethod
    def _predict(self, X: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def _params_dict(self) -> dict[str, Any]:
        """Fitted state of the model."""
        pass

    @classmethod
    @abstractmethod
    def _from_params(cls, params: dict[str, Any]) -> "Regressor":
        pass

    def to_dict(self) -> dict[str, Any]:
        return {"kind": self.name, "n_features": self.n_features, "params": self._params_dict()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Regressor":
        model = cls._from_params(data["params"])
        model._n_features = int(data["n_features"])
        return model

    @staticmethod
    def _check_training(X: np.ndarray, y: np.ndarray, min_examples: int = 1):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64).reshape(-1)
        if X.ndim == 1:
            X = X[:, None]
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X has {X.shape[0]} rows but y has {y.shape[0]} targets")
        if X.shape[0] < min_examples:
            raise InsufficientDataError("Cannot fit a model on an empty dataset")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
            raise ValueError("Training data must be finite")
        return X, y

    def __repr__(self) -> str:
        state = f"n_features={self._n_features}" if self.is_fitted else "unfitted"
        return f"{self.__class__.__name__}({state})"
