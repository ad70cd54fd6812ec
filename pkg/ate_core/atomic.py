"""
Atomic file writes.

Every file the package produces is written to a temp file beside its target
and renamed over it, so readers never see a partial file.
"""

import json
import os
import tempfile
from pathlib import Path
from typing import Any, Optional, Union

import cv2
import numpy as np
import pandas as pd

PathLike = Union[str, os.PathLike]


def atomic_write_bytes(path: PathLike, data: bytes) -> Path:
    """Write to a temp file beside path, then rename over it."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as handle:
            handle.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def atomic_write_text(path: PathLike, text: str, encoding: str = "utf-8") -> Path:
    return atomic_write_bytes(path, text.encode(encoding))


def to_json_text(data: Any, indent: Optional[int] = 2) -> str:
    return json.dumps(data, sort_keys=True, indent=indent) + "\n"


def write_json(path: PathLike, data: Any, indent: Optional[int] = 2) -> Path:
    return atomic_write_text(path, to_json_text(data, indent))


def write_csv(path: PathLike, table: pd.DataFrame, float_format: Optional[str] = "%.17g") -> Path:
    """Write a frame without its index; floats keep their round-trip digits."""
    return atomic_write_text(path, table.to_csv(index=False, float_format=float_format,
                                                lineterminator="\n"))


def write_image(path: PathLike, pixels: np.ndarray) -> Path:
    """Encode an 8-bit image by the file extension and write it."""
    path = Path(path)
    ok, encoded = cv2.imencode(path.suffix, pixels)
    if not ok:
        raise ValueError(f"Cannot encode an image as {path.suffix!r}")
    return atomic_write_bytes(path, encoded.tobytes())
