"""
Evaluation reports and the tables built from them.

Every report renders to a JSON-friendly dict and to aligned-column text.
"""

import hashlib
import math
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np
import pandas as pd

from .metrics import is_failed

METRIC_FIELDS = ("r2", "mape", "mae", "rmse")


def partition_hash(train_fingerprint: str, test_fingerprint: str) -> str:
    """Short digest identifying one train/test partition."""
    digest = hashlib.sha256(f"{train_fingerprint}|{test_fingerprint}".encode("utf-8"))
    return digest.hexdigest()[:16]


def _json_float(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


@dataclass(frozen=True)
class PredictionRecord:
    """One test example with its prediction (for scatter/error-distribution dumps)."""
    sequence_id: str
    cutoff_k: int
    y: float
    yhat: float

    @property
    def abs_pct_error(self) -> Optional[float]:
        if self.y == 0:
            return None
        return abs(self.y - self.yhat) / abs(self.y)

    def to_dict(self) -> dict[str, Any]:
        return {
            "sequence_id": self.sequence_id,
            "cutoff_k": self.cutoff_k,
            "y": self.y,
            "yhat": self.yhat,
            "abs_pct_error": self.abs_pct_error,
        }


@dataclass
class EvalReport:
    """
    Metrics of one model on one test set.

    A regression is failed when R2 or MAPE falls outside [0, 1], or when a
    metric is undefined (the cause is kept in error).
    """
    r2: Optional[float]
    mape: Optional[float]
    mae: Optional[float]
    rmse: Optional[float]
    n: int
    testcase_id: str = ""
    pooling_kind: str = ""
    train_fraction: Optional[float] = None
    model_kind: str = ""
    mape_excluded: int = 0
    partition_hash: str = ""
    error: Optional[str] = None
    predictions: list[PredictionRecord] = field(default_factory=list, repr=False)
    failed: bool = field(init=False)

    def __post_init__(self):
        self.failed = self.error is not None or is_failed(self.r2, self.mape)

    @classmethod
    def failure(cls, error: str, **metadata) -> "EvalReport":
        """A row for an evaluation that could not be run at all."""
        return cls(r2=None, mape=None, mae=None, rmse=None, n=0, error=error, **metadata)

    @property
    def accuracy(self) -> Optional[float]:
        """1 - MAPE, the headline accuracy reading."""
        return None if self.mape is None else 1.0 - self.mape

    def metric(self, name: str) -> Optional[float]:
        return getattr(self, name)

    def to_dict(self, include_predictions: bool = False) -> dict[str, Any]:
        data = {
            "r2": _json_float(self.r2),
            "mape": _json_float(self.mape),
            "mae": _json_float(self.mae),
            "rmse": _json_float(self.rmse),
            "accuracy": _json_float(self.accuracy),
            "n": self.n,
            "failed": self.failed,
            "testcase_id": self.testcase_id,
            "pooling_kind": self.pooling_kind,
            "train_fraction": self.train_fraction,
            "model_kind": self.model_kind,
            "mape_excluded": self.mape_excluded,
            "partition_hash": self.partition_hash,
            "error": self.error,
        }
        if include_predictions:
            data["predictions"] = [p.to_dict() for p in self.predictions]
        return data

    def predictions_frame(self) -> pd.DataFrame:
        columns = ["sequence_id", "cutoff_k", "y", "yhat", "abs_pct_error"]
        return pd.DataFrame([p.to_dict() for p in self.predictions], columns=columns)

    def row(self) -> dict[str, Any]:
        return {
            "testcase": self.testcase_id,
            "model": self.model_kind,
            "pooling": self.pooling_kind,
            "fraction": self.train_fraction,
            "R2": self.r2,
            "MAPE%": None if self.mape is None else 100.0 * self.mape,
            "MAE": self.mae,
            "RMSE": self.rmse,
            "n": self.n,
            "failed": self.failed,
        }


def render_table(rows: Sequence[dict[str, Any]], float_format: str = "{:.4f}") -> str:
    """Aligned-column text for a list of flat row dicts."""
    if not rows:
        return "(no rows)\n"
    table = pd.DataFrame(list(rows))
    return table.to_string(
        index=False,
        na_rep="-",
        float_format=lambda v: float_format.format(v),
    ) + "\n"


def _median(values: Sequence[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None and math.isfinite(v)]
    return float(np.median(defined)) if defined else None


def _mean(values: Sequence[Optional[float]]) -> Optional[float]:
    defined = [v for v in values if v is not None and math.isfinite(v)]
    return float(np.mean(defined)) if defined else None


@dataclass
class SweepRow:
    """Reports of one training fraction, one per master seed."""
    train_fraction: float
    reports: list[EvalReport]

    @property
    def median_r2(self) -> Optional[float]:
        return _median([r.r2 for r in self.reports])

    @property
    def median_mape(self) -> Optional[float]:
        return _median([r.mape for r in self.reports])

    @property
    def n_failed(self) -> int:
        return sum(r.failed for r in self.reports)


@dataclass
class SweepReport:
    """Training-fraction sweep with rows in strictly increasing fraction order."""
    rows: list[SweepRow]
    testcase_id: str = ""
    pooling_kind: str = ""

    def __post_init__(self):
        fractions = [row.train_fraction for row in self.rows]
        if any(b <= a for a, b in zip(fractions, fractions[1:])):
            raise ValueError(f"Sweep fractions must be strictly increasing, got {fractions}")

    @property
    def fractions(self) -> list[float]:
        return [row.train_fraction for row in self.rows]

    def row_at(self, fraction: float) -> SweepRow:
        for row in self.rows:
            if math.isclose(row.train_fraction, fraction, abs_tol=1e-9):
                return row
        raise KeyError(f"No sweep row at fraction {fraction}")

    def relative_change(self, reference: float = 0.7) -> dict[float, dict[str, Optional[float]]]:
        """
        Relative change of median R2 and MAPE of every row vs the reference row.

        A value of -0.1 for r2 at 0.2 reads "R2 is 10 % lower when training
        on 20 % than on the reference fraction".
        """
        ref = self.row_at(reference)
        result = {}
        for row in self.rows:
            changes: dict[str, Optional[float]] = {}
            for name, value, base in (
                ("r2", row.median_r2, ref.median_r2),
                ("mape", row.median_mape, ref.median_mape),
            ):
                changes[name] = (
                    None if value is None or base is None or base == 0
                    else (value - base) / abs(base)
                )
            result[row.train_fraction] = changes
        return result

    def to_dict(self) -> dict[str, Any]:
        return {
            "testcase_id": self.testcase_id,
            "pooling_kind": self.pooling_kind,
            "rows": [
                {
                    "train_fraction": row.train_fraction,
                    "median_r2": row.median_r2,
                    "median_mape": row.median_mape,
                    "n_failed": row.n_failed,
                    "reports": [r.to_dict() for r in row.reports],
                }
                for row in self.rows
            ],
        }

    def to_text(self) -> str:
        return render_table([
            {
                "fraction": row.train_fraction,
                "median R2": row.median_r2,
                "median MAPE%": None if row.median_mape is None else 100 * row.median_mape,
                "failed": f"{row.n_failed}/{len(row.reports)}",
            }
            for row in self.rows
        ])


@dataclass
class BaselineRow:
    testcase_id: str
    baseline: EvalReport
    model: EvalReport


@dataclass
class BaselineTable:
    """ATE-at-fraction baseline vs the trained model, one row per testcase."""
    rows: list[BaselineRow]
    fraction: float = 0.2

    def to_dict(self) -> dict[str, Any]:
        return {
            "fraction": self.fraction,
            "rows": [
                {
                    "testcase_id": row.testcase_id,
                    "baseline_r2": _json_float(row.baseline.r2),
                    "baseline_mape": _json_float(row.baseline.mape),
                    "model_r2": _json_float(row.model.r2),
                    "model_mape": _json_float(row.model.mape),
                }
                for row in self.rows
            ],
        }

    def to_text(self) -> str:
        label = f"ATE@{round(100 * self.fraction)}%"
        return render_table([
            {
                "Testcase": row.testcase_id,
                f"{label} R2": row.baseline.r2,
                f"{label} MAPE": row.baseline.mape,
                "Forest R2": row.model.r2,
                "Forest MAPE": row.model.mape,
            }
            for row in self.rows
        ])


@dataclass
class PoolingComparison:
    """Per-kind reports over one or more testcases, with mean/median summaries."""
    reports: dict[str, list[EvalReport]]

    def extend(self, other: "PoolingComparison") -> None:
        """Append the reports of another testcase, kind by kind."""
        for kind, reports in other.reports.items():
            self.reports.setdefault(kind, []).extend(reports)

    def summary(self) -> dict[str, dict[str, Optional[float]]]:
        result = {}
        for kind, reports in self.reports.items():
            stats: dict[str, Optional[float]] = {}
            for name in ("r2", "mape"):
                values = [r.metric(name) for r in reports]
                stats[f"mean_{name}"] = _mean(values)
                stats[f"median_{name}"] = _median(values)
            stats["n_failed"] = sum(r.failed for r in reports)
            result[kind] = stats
        return result

    def to_dict(self) -> dict[str, Any]:
        return {
            "reports": {k: [r.to_dict() for r in v] for k, v in self.reports.items()},
            "summary": self.summary(),
        }

    def to_text(self) -> str:
        rows = [r.row() for reports in self.reports.values() for r in reports]
        summary = [{"pooling": kind, **stats} for kind, stats in self.summary().items()]
        return render_table(rows) + "\n" + render_table(summary)


@dataclass
class ModelComparison:
    """Per-family reports on identical partitions, with failure counts."""
    reports: dict[str, list[EvalReport]]

    def extend(self, other: "ModelComparison") -> None:
        for kind, reports in other.reports.items():
            self.reports.setdefault(kind, []).extend(reports)

    def failure_counts(self) -> dict[str, int]:
        return {kind: sum(r.failed for r in reports) for kind, reports in self.reports.items()}

    def to_dict(self) -> dict[str, Any]:
        return {
            "reports": {k: [r.to_dict() for r in v] for k, v in self.reports.items()},
            "failure_counts": self.failure_counts(),
        }

    def to_text(self) -> str:
        rows = [r.row() for reports in self.reports.values() for r in reports]
        counts = [
            {"model": kind, "failed": n, "total": len(self.reports[kind])}
            for kind, n in self.failure_counts().items()
        ]
        return render_table(rows) + "\n" + render_table(counts)
