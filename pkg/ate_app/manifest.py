"""
Run manifest: config hash, per-stage input/output digests and versions.

Timings are kept out of the manifest (they go to timings.json) so two runs
with the same config and seed produce byte-identical manifests.
"""

import platform
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import joblib
import numpy as np
import pandas as pd
import scipy

import ate_core
from ate_core.atomic import to_json_text, write_json

from .storage import PathLike, digest_bytes, file_digest


def config_hash(payload: dict[str, Any]) -> str:
    return digest_bytes(to_json_text(payload).encode("utf-8"))


def library_versions() -> dict[str, str]:
    return {
        "ate_core": ate_core.__version__,
        "joblib": joblib.__version__,
        "numpy": np.__version__,
        "pandas": pd.__version__,
        "python": platform.python_version(),
        "scipy": scipy.__version__,
    }


@dataclass
class StageRecord:
    """Digests of what one stage read and wrote."""
    inputs: dict[str, str] = field(default_factory=dict)
    outputs: dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return {"inputs": dict(sorted(self.inputs.items())),
                "outputs": dict(sorted(self.outputs.items()))}


@dataclass
class RunManifest:
    """
    Record of one CLI run.

    Output paths are stored relative to the output root so manifests of runs
    written to different directories can be compared.
    """
    config_hash: str
    root: Path
    stages: dict[str, StageRecord] = field(default_factory=dict)
    timings: dict[str, float] = field(default_factory=dict)
    versions: dict[str, str] = field(default_factory=library_versions)

    def stage(self, name: str) -> StageRecord:
        return self.stages.setdefault(name, StageRecord())

    def _label(self, path: Path) -> str:
        path = Path(path).resolve()
        try:
            return path.relative_to(self.root.resolve()).as_posix()
        except ValueError:
            return str(path)

    def record_input(self, stage: str, path: PathLike) -> None:
        self.stage(stage).inputs[self._label(Path(path))] = file_digest(path)

    def record_output(self, stage: str, path: PathLike) -> None:
        self.stage(stage).outputs[self._label(Path(path))] = file_digest(path)

    def add_timing(self, stage: str, seconds: float) -> None:
        self.timings[stage] = self.timings.get(stage, 0.0) + seconds

    def to_dict(self) -> dict[str, Any]:
        return {
            "config_hash": self.config_hash,
            "stages": {name: rec.to_dict() for name, rec in sorted(self.stages.items())},
            "versions": self.versions,
        }

    def save(self, path: Optional[PathLike] = None) -> Path:
        path = Path(path) if path is not None else self.root / "manifest.json"
        write_json(path.with_name("timings.json"),
                   {k: round(v, 6) for k, v in sorted(self.timings.items())})
        return write_json(path, self.to_dict())
