"""
Descriptor CSV persistence: one row per descriptor keyed by source_id.
"""

from pathlib import Path
from typing import Iterable, Iterator, Union

import numpy as np
import pandas as pd

from ..atomic import write_csv
from .types import Descriptor

SOURCE_COLUMN = "source_id"


def write_descriptors(descriptors: Iterable[Descriptor], path: Union[str, Path]) -> Path:
    """Write descriptors sharing one feature layout to CSV."""
    descriptors = list(descriptors)
    if not descriptors:
        raise ValueError("No descriptors to write")
    names = descriptors[0].feature_names
    for d in descriptors:
        if d.feature_names != names:
            raise ValueError(f"Descriptor {d.source_id!r} has a different feature layout")
    table = pd.DataFrame(np.vstack([d.values for d in descriptors]), columns=list(names))
    table.insert(0, SOURCE_COLUMN, [d.source_id for d in descriptors])
    return write_csv(path, table)


def iter_descriptor_chunks(
    path: Union[str, Path], chunksize: int = 1024
) -> Iterator[pd.DataFrame]:
    """Stream a descriptor CSV in chunks (constant memory in row count)."""
    reader = pd.read_csv(path, chunksize=chunksize, dtype={SOURCE_COLUMN: str},
                         float_precision="round_trip")
    with reader:
        yield from reader


def read_descriptors(path: Union[str, Path]) -> list[Descriptor]:
    """Read a whole descriptor CSV."""
    table = pd.read_csv(path, dtype={SOURCE_COLUMN: str}, float_precision="round_trip")
    names = tuple(c for c in table.columns if c != SOURCE_COLUMN)
    values = table.loc[:, list(names)].to_numpy(dtype=np.float64)
    ids = table[SOURCE_COLUMN] if SOURCE_COLUMN in table.columns else [""] * len(table)
    return [Descriptor(row, names, str(sid)) for row, sid in zip(values, ids)]
