"""
1-D global pooling of characterization matrices.

Each matrix row (one metric over all frames) is reduced to a scalar, so
sequences of any length map to descriptors of the same width.
"""

from typing import Optional, Union

import numpy as np

from ..characterization.types import CharacterizationMatrix
from . import functions  # noqa: F401  (registers the reducers)
from .registry import PoolRegistry
from .types import Descriptor, PoolingFunction, PoolKind


def pool_kinds() -> list[PoolKind]:
    """All twelve pooling kinds in their fixed order (mean first, concat_all last)."""
    return list(PoolKind)


def pool_row(row: np.ndarray, kind: Union[PoolKind, str], histogram_bins: int = 10) -> float:
    """Apply one single pooling kind to a 1-D row."""
    row = np.asarray(row, dtype=np.float64).reshape(-1)
    if row.size == 0:
        raise ValueError("Cannot pool an empty row")
    return PoolRegistry.get(PoolKind.parse(kind))(row, histogram_bins)


def pool(
    matrix: CharacterizationMatrix,
    f: Union[PoolingFunction, PoolKind, str] = PoolKind.MEAN,
    source_id: Optional[str] = None,
) -> Descriptor:
    """
    Reduce every row of a characterization matrix.

    Args:
        matrix: m x n matrix with n >= 1
        f: Pooling function (or bare kind, using the default bin count)
        source_id: Descriptor id (default: the matrix sequence id)

    Returns:
        Descriptor of width m (single kinds) or 11m (concat_all), ordered
        kind-major: all metrics under the first kind, then the next kind
    """
    if not isinstance(f, PoolingFunction):
        f = PoolingFunction(kind=PoolKind.parse(f))
    if matrix.n_frames < 1:
        raise ValueError("Cannot pool a matrix without frames")
    values: list[float] = []
    names: list[str] = []
    for kind in f.components:
        reducer = PoolRegistry.get(kind)
        for name, row in zip(matrix.metric_names, matrix.values):
            values.append(reducer(row, f.histogram_bins))
            names.append(f"{name}:{kind.value}")
    return Descriptor(
        values=np.array(values, dtype=np.float64),
        feature_names=tuple(names),
        source_id=matrix.sequence_id if source_id is None else source_id,
    )
