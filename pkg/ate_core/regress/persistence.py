"""
Trained-model bundles and their versioned JSON documents.

A bundle pairs a fitted regressor with the feature mask it was trained
behind and free-form training metadata (testcase, pooling kind, train
fraction, seed). Floats are written with their shortest round-trip repr, so
a reloaded model predicts bit-identically.
"""

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence, Union

import numpy as np

from ..atomic import write_json
from ..errors import ModelFormatError, WidthMismatchError
from ..features.correlation import mask_vector
from ..features.types import FeatureMask
from ..pooling.types import Descriptor
from .base import Regressor
from .registry import RegressorRegistry

MODEL_FORMAT = "ate-forest-model"
MODEL_VERSION = 1


@dataclass
class ModelBundle:
    """
    A regressor ready for prediction on raw or masked descriptors.

    Attributes:
        regressor: Fitted model over the masked layout
        feature_mask: Mask from the raw descriptor layout to the model input
        metadata: Training metadata (testcase_id, pooling_kind, train_fraction, ...)
    """
    regressor: Regressor
    feature_mask: FeatureMask
    metadata: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.regressor.n_features != self.feature_mask.masked_width:
            raise ValueError(
                f"Regressor width {self.regressor.n_features} does not match "
                f"mask width {self.feature_mask.masked_width}"
            )

    @property
    def raw_width(self) -> int:
        return self.feature_mask.width

    @property
    def masked_width(self) -> int:
        return self.feature_mask.masked_width

    def prepare(self, X: np.ndarray) -> np.ndarray:
        """Bring (N, d) rows of raw or masked width to the model input width."""
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        width = X.shape[1]
        if width == self.masked_width:
            return X
        if width == self.raw_width:
            return mask_vector(X, self.feature_mask)
        raise WidthMismatchError(
            f"Expected width {self.raw_width} (raw) or {self.masked_width} (masked), got {width}"
        )

    def input_columns(self, columns: Sequence[str]) -> list[str]:
        """
        Select and order named descriptor columns for prediction.

        Columns are matched by name against the raw layout, then against the
        masked one, and returned in model order. A model trained without
        feature names takes the columns as they come.

        Raises:
            WidthMismatchError: If the columns fit neither layout (names the
                missing and unexpected columns)
        """
        columns = [str(c) for c in columns]
        raw = list(self.feature_mask.feature_names)
        if not raw:
            if len(columns) not in (self.raw_width, self.masked_width):
                raise WidthMismatchError(
                    f"Expected width {self.raw_width} (raw) or {self.masked_width} (masked), "
                    f"got {len(columns)}"
                )
            return columns
        present = set(columns)
        layouts = (raw, list(self.feature_mask.kept_names))
        for layout in layouts:
            if len(columns) == len(layout) and present == set(layout):
                return layout
        layout = min(layouts, key=lambda names: len(present.symmetric_difference(names)))
        missing = [name for name in layout if name not in present]
        unexpected = [name for name in columns if name not in set(layout)]
        raise WidthMismatchError(
            f"Feature columns do not match the model: missing {missing}, "
            f"unexpected {unexpected}"
        )

    def predict(self, X: np.ndarray) -> np.ndarray:
        return self.regressor.predict(self.prepare(X))

    def to_dict(self) -> dict[str, Any]:
        return {
            "format": MODEL_FORMAT,
            "version": MODEL_VERSION,
            "model": self.regressor.to_dict(),
            "feature_mask": self.feature_mask.to_dict(),
            "metadata": self.metadata,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ModelBundle":
        if data.get("format") != MODEL_FORMAT:
            raise ModelFormatError(f"Not a model document (format={data.get('format')!r})")
        if data.get("version") != MODEL_VERSION:
            raise ModelFormatError(f"Unsupported model version {data.get('version')!r}")
        try:
            regressor = RegressorRegistry.from_dict(data["model"])
            mask = FeatureMask.from_dict(data["feature_mask"])
            return cls(regressor, mask, dict(data.get("metadata", {})))
        except (KeyError, TypeError, ValueError) as exc:
            raise ModelFormatError(f"Malformed model document: {exc}") from exc


def save_model(bundle: ModelBundle, path: Union[str, Path]) -> Path:
    return write_json(path, bundle.to_dict(), indent=None)


def load_model(path: Union[str, Path]) -> ModelBundle:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"{path}: invalid JSON ({exc})") from exc
    return ModelBundle.from_dict(data)


def predict(
    model: Union[ModelBundle, Regressor], descriptor: Union[Descriptor, np.ndarray]
) -> float:
    """
    Predict the ATE of one descriptor.

    A bundle accepts the raw (pre-mask) width and applies its mask, or the
    masked width directly; a bare regressor needs its own input width.
    """
    values = descriptor.values if isinstance(descriptor, Descriptor) else descriptor
    values = np.asarray(values, dtype=np.float64).reshape(-1)
    return float(model.predict(values[None, :])[0])
