"""
Deterministic random streams.

Every stochastic choice in the pipeline draws from a generator derived from
(master seed, purpose tag, index...). Streams are counter-based (Philox), so
the draws of one tree or one candidate never depend on how many other streams
were consumed before it or on which worker ran it.
"""

import zlib

import numpy as np


def tag_key(tag: str) -> int:
    """Stable 32-bit key for a purpose tag (identical across platforms)."""
    return zlib.crc32(tag.encode("utf-8"))


def derive_rng(master_seed: int, tag: str, *indices: int) -> np.random.Generator:
    """
    Create the generator for one (seed, purpose, index) coordinate.

    Args:
        master_seed: Non-negative master seed of the run
        tag: Purpose tag, e.g. "bootstrap" or "tune-candidates"
        *indices: Non-negative integer coordinates (tree index, fold, ...)

    Returns:
        A numpy Generator backed by a Philox bit generator
    """
    if master_seed < 0 or any(i < 0 for i in indices):
        raise ValueError("seed and indices must be non-negative")
    entropy = [int(master_seed), tag_key(tag), *[int(i) for i in indices]]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def derive_seed(master_seed: int, tag: str, *indices: int) -> int:
    """Derive a child integer seed, for APIs that take a plain seed."""
    return int(derive_rng(master_seed, tag, *indices).integers(0, 2**31 - 1))
