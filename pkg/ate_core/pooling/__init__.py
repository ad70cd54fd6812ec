"""
Pooling module: 1-D global pooling of characterization matrices.

This module provides the twelve pooling kinds (eleven statistical or
diversity reducers plus their concatenation) and descriptor persistence.
"""

from .io import iter_descriptor_chunks, read_descriptors, write_descriptors
from .pool import pool, pool_kinds, pool_row
from .registry import PoolRegistry, register_pool
from .types import (
    DEFAULT_HISTOGRAM_BINS,
    SINGLE_KINDS,
    Descriptor,
    PoolingFunction,
    PoolKind,
)

__all__ = [
    "DEFAULT_HISTOGRAM_BINS",
    "SINGLE_KINDS",
    "Descriptor",
    "PoolingFunction",
    "PoolKind",
    "PoolRegistry",
    "register_pool",
    "pool",
    "pool_kinds",
    "pool_row",
    "iter_descriptor_chunks",
    "read_descriptors",
    "write_descriptors",
]
