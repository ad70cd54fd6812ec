"""
Dataset CSV and feature-mask JSON interchange.

Dataset columns: sequence_id, cutoff_k, ate, then one column per feature.
"""

import json
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd

from ..atomic import write_csv, write_json
from .types import Dataset, FeatureMask

META_COLUMNS = ("sequence_id", "cutoff_k", "ate")


def dataset_to_frame(dataset: Dataset) -> pd.DataFrame:
    table = pd.DataFrame(np.asarray(dataset.X), columns=list(dataset.feature_names))
    table.insert(0, "ate", dataset.y)
    table.insert(0, "cutoff_k", dataset.cutoffs)
    table.insert(0, "sequence_id", dataset.sequence_ids)
    return table


def dataset_from_frame(table: pd.DataFrame, testcase_id: str = "") -> Dataset:
    missing = [c for c in META_COLUMNS if c not in table.columns]
    if missing:
        raise ValueError(f"Dataset table is missing columns {missing}")
    names = [c for c in table.columns if c not in META_COLUMNS]
    return Dataset.from_arrays(
        X=table.loc[:, names].to_numpy(dtype=np.float64).reshape(len(table), len(names)),
        y=table["ate"].to_numpy(dtype=np.float64),
        sequence_ids=table["sequence_id"].astype(str).tolist(),
        cutoffs=table["cutoff_k"].astype(int).tolist(),
        feature_names=names,
        testcase_id=testcase_id,
    )


def save_dataset(dataset: Dataset, path: Union[str, Path]) -> Path:
    return write_csv(path, dataset_to_frame(dataset))


def load_dataset(path: Union[str, Path], testcase_id: str = "") -> Dataset:
    table = pd.read_csv(path, dtype={"sequence_id": str}, float_precision="round_trip")
    return dataset_from_frame(table, testcase_id)


def save_mask(mask: FeatureMask, path: Union[str, Path]) -> Path:
    return write_json(path, mask.to_dict())


def load_mask(path: Union[str, Path]) -> FeatureMask:
    return FeatureMask.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
