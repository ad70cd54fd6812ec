"""
Sequence-respecting partitions: the train/test split and CV folds.

Nothing is shuffled. Whole sequences go to one side in listed order, so
sub-trajectories of one sequence never appear on both sides.
"""

import logging
from typing import Sequence

import numpy as np

from ..errors import SplitError
from .types import Dataset

logger = logging.getLogger(__name__)


def sequence_blocks(sequence_ids: Sequence[str]) -> list[tuple[str, int, int]]:
    """
    Contiguous (sequence_id, start, stop) blocks of a grouped id list.

    Raises:
        SplitError: If a sequence appears in two separate blocks
    """
    blocks: list[tuple[str, int, int]] = []
    seen: set[str] = set()
    for i, sid in enumerate(sequence_ids):
        if blocks and blocks[-1][0] == sid:
            name, start, _ = blocks[-1]
            blocks[-1] = (name, start, i + 1)
            continue
        if sid in seen:
            raise SplitError(f"Examples of sequence {sid!r} are not contiguous")
        seen.add(sid)
        blocks.append((sid, i, i + 1))
    return blocks


def sequential_split(dataset: Dataset, train_fraction: float) -> tuple[Dataset, Dataset]:
    """
    Split a dataset into train and test sides by whole sequences.

    Sequences are assigned to train in listed order until the cumulative
    example count reaches train_fraction * N; the rest go to test.

    Args:
        dataset: Dataset grouped by sequence_id
        train_fraction: Fraction in (0, 1)

    Returns:
        (train, test), both non-empty
    """
    if not 0 < train_fraction < 1:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    blocks = sequence_blocks(dataset.sequence_ids)
    if len(blocks) < 2:
        raise SplitError("A single-sequence dataset cannot be split by sequence")

    target = train_fraction * len(dataset)
    stop = 0
    n_train_blocks = 0
    for _, _, block_stop in blocks:
        stop = block_stop
        n_train_blocks += 1
        if stop >= target - 1e-9:
            break
    if n_train_blocks >= len(blocks):
        raise SplitError(
            f"train_fraction {train_fraction} leaves no sequence for the test side"
        )
    logger.debug(
        "Split %d examples into %d train / %d test (%d of %d sequences)",
        len(dataset), stop, len(dataset) - stop, n_train_blocks, len(blocks),
    )
    return dataset.subset(range(stop)), dataset.subset(range(stop, len(dataset)))


def sequence_folds(dataset: Dataset, k_folds: int) -> list[np.ndarray]:
    """
    Contiguous, unshuffled CV folds as arrays of example indices.

    Folds are made of whole sequences while there are at least k_folds of
    them; otherwise they fall back to contiguous example blocks.
    """
    if k_folds < 2:
        raise ValueError(f"k_folds must be at least 2, got {k_folds}")
    n = len(dataset)
    if n < k_folds:
        raise SplitError(f"{n} examples cannot fill {k_folds} folds")
    blocks = sequence_blocks(dataset.sequence_ids)
    if len(blocks) >= k_folds:
        block_groups = np.array_split(np.arange(len(blocks)), k_folds)
        return [
            np.arange(blocks[g[0]][1], blocks[g[-1]][2])
            for g in block_groups
        ]
    logger.warning(
        "Only %d sequences for %d folds; falling back to contiguous example blocks",
        len(blocks), k_folds,
    )
    return list(np.array_split(np.arange(n), k_folds))
