"""
Sequence directory reading and characterization-matrix persistence.

A sequence directory has an index CSV (timestamp, image_path) whose image
paths are relative to the index file, and optionally an IMU CSV
(timestamp, gx, gy, gz, ax, ay, az). Matrices are stored as CSV with a
header of metric names and one row per frame.
"""

import logging
from pathlib import Path
from typing import Optional, Union

import cv2
import numpy as np
import pandas as pd

from ..atomic import write_csv
from ..errors import CharacterizationError
from .types import CharacterizationMatrix, Frame

logger = logging.getLogger(__name__)

INDEX_COLUMNS = ("timestamp", "image_path")
IMU_COLUMNS = ("timestamp", "gx", "gy", "gz", "ax", "ay", "az")
TIMESTAMP_COLUMN = "timestamp"


def decode_image(path: Union[str, Path]) -> np.ndarray:
    """
    Decode a raster file to an 8-bit grayscale array.

    PGM is always supported; any other format OpenCV can read works too.
    """
    pixels = cv2.imread(str(path), cv2.IMREAD_GRAYSCALE)
    if pixels is None:
        raise CharacterizationError(f"cannot decode image {path}")
    return pixels


def _require_columns(frame: pd.DataFrame, columns: tuple[str, ...], path: Path) -> None:
    missing = [c for c in columns if c not in frame.columns]
    if missing:
        raise CharacterizationError(f"{path} is missing columns: {', '.join(missing)}")


def load_imu(path: Union[str, Path]) -> np.ndarray:
    """Read an IMU CSV into a (S, 7) array sorted by timestamp."""
    path = Path(path)
    table = pd.read_csv(path)
    _require_columns(table, IMU_COLUMNS, path)
    data = table.loc[:, list(IMU_COLUMNS)].to_numpy(dtype=np.float64)
    return data[np.argsort(data[:, 0], kind="stable")]


def load_sequence(
    index_path: Union[str, Path],
    imu_path: Optional[Union[str, Path]] = None,
) -> list[Frame]:
    """
    Read a sequence into frames.

    Each frame receives the IMU samples with previous_t < t <= frame_t (the
    first frame receives everything up to its own timestamp).

    Args:
        index_path: CSV with columns timestamp, image_path
        imu_path: Optional IMU CSV

    Returns:
        Frames sorted by timestamp
    """
    index_path = Path(index_path)
    index = pd.read_csv(index_path)
    if TIMESTAMP_COLUMN not in index.columns:
        raise CharacterizationError(f"{index_path} has no timestamp column")
    index = index.sort_values(TIMESTAMP_COLUMN, kind="stable").reset_index(drop=True)
    timestamps = index[TIMESTAMP_COLUMN].to_numpy(dtype=np.float64)
    has_images = "image_path" in index.columns

    imu = load_imu(imu_path) if imu_path is not None else None
    if imu is not None:
        bounds = np.searchsorted(imu[:, 0], timestamps, side="right")

    frames: list[Frame] = []
    for j, t in enumerate(timestamps):
        pixels = None
        if has_images and isinstance(index.at[j, "image_path"], str):
            pixels = decode_image(index_path.parent / index.at[j, "image_path"])
        window = None
        if imu is not None:
            start = bounds[j - 1] if j > 0 else 0
            window = imu[start:bounds[j], 1:7]
        try:
            frames.append(Frame(timestamp=float(t), pixels=pixels, imu_window=window))
        except ValueError as exc:
            raise CharacterizationError(str(exc), frame_index=j) from None
    if not frames:
        raise CharacterizationError(f"{index_path} lists no frames")
    logger.debug("Loaded %d frames from %s", len(frames), index_path)
    return frames


def save_matrix(matrix: CharacterizationMatrix, path: Union[str, Path]) -> Path:
    """Write a matrix as CSV: timestamp column (if known), then one column per metric."""
    table = pd.DataFrame(matrix.values.T, columns=list(matrix.metric_names))
    if matrix.timestamps is not None:
        table.insert(0, TIMESTAMP_COLUMN, matrix.timestamps)
    return write_csv(path, table)


def load_matrix(path: Union[str, Path], sequence_id: str) -> CharacterizationMatrix:
    """Read a matrix written by save_matrix."""
    table = pd.read_csv(path, float_precision="round_trip")
    timestamps = None
    if TIMESTAMP_COLUMN in table.columns:
        timestamps = table.pop(TIMESTAMP_COLUMN).to_numpy(dtype=np.float64)
    return CharacterizationMatrix(
        values=table.to_numpy(dtype=np.float64).T,
        metric_names=tuple(table.columns),
        sequence_id=sequence_id,
        timestamps=timestamps,
    )
