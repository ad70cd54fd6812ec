"""
Output storage: content digests and the matrix cache.
"""

import hashlib
import logging
import os
from pathlib import Path
from typing import Iterable, Optional, Union

import pandas as pd

from ate_core.characterization.io import load_matrix, save_matrix
from ate_core.characterization.types import CharacterizationMatrix

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]


def digest_bytes(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def file_digest(path: PathLike) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as handle:
        for block in iter(lambda: handle.read(1 << 20), b""):
            digest.update(block)
    return digest.hexdigest()


def combined_digest(parts: Iterable[str]) -> str:
    digest = hashlib.sha256()
    for part in parts:
        digest.update(part.encode("utf-8"))
        digest.update(b"\x00")
    return digest.hexdigest()


class MatrixCache:
    """
    Characterization matrices on disk, keyed by the digest of their inputs.

    The key covers the frame index, every referenced image, the IMU file and
    the metric set, so a cached matrix is reused only for identical inputs.
    """

    def __init__(self, root: PathLike):
        self.root = Path(root)

    @staticmethod
    def key(index_path: Path, imu_path: Optional[Path], metric_names: Iterable[str]) -> str:
        parts = [file_digest(index_path)]
        index = pd.read_csv(index_path)
        if "image_path" in index.columns:
            for name in index["image_path"].dropna():
                parts.append(file_digest(index_path.parent / str(name)))
        parts.append(file_digest(imu_path) if imu_path is not None else "no-imu")
        parts.extend(metric_names)
        return combined_digest(parts)

    def path(self, key: str) -> Path:
        return self.root / f"{key}.csv"

    def get(self, key: str, sequence_id: str) -> Optional[CharacterizationMatrix]:
        path = self.path(key)
        if not path.exists():
            return None
        logger.debug("Matrix cache hit for %s (%s)", sequence_id, key[:12])
        return load_matrix(path, sequence_id)

    def put(self, key: str, matrix: CharacterizationMatrix) -> Path:
        return save_matrix(matrix, self.path(key))
