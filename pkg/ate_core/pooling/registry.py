"""
Pool registry mapping single pooling kinds to row reducers.
"""

from typing import Callable, Dict

import numpy as np

from .types import PoolKind

RowReducer = Callable[[np.ndarray, int], float]


class PoolRegistry:
    """
    Registry for row reducers.

    A reducer takes (row, histogram_bins) and returns one finite scalar.
    """

    _reducers: Dict[PoolKind, RowReducer] = {}

    @classmethod
    def register(cls, kind: PoolKind, reducer: RowReducer) -> None:
        if kind is PoolKind.CONCAT_ALL:
            raise ValueError("concat_all is composed from the single kinds")
        cls._reducers[kind] = reducer

    @classmethod
    def get(cls, kind: PoolKind) -> RowReducer:
        try:
            return cls._reducers[PoolKind.parse(kind)]
        except KeyError:
            raise KeyError(f"No reducer registered for {kind}") from None

    @classmethod
    def list_kinds(cls) -> list[PoolKind]:
        return list(cls._reducers.keys())


def register_pool(kind: PoolKind):
    """
    Decorator for registering row reducers.

    Usage:
        @register_pool(PoolKind.MEAN)
        def pool_mean(row, bins): ...
    """
    def decorator(reducer: RowReducer) -> RowReducer:
        PoolRegistry.register(kind, reducer)
        return reducer
    return decorator
