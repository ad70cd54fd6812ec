"""
Pipeline configuration.

One JSON file describes the testcases and experiment knobs. CLI flags override
single fields and the merged document is validated again. Relative paths
resolve against the directory of the config file.
"""

import json
import os
from pathlib import Path
from typing import Any, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from ate_core.errors import ConfigError
from ate_core.experiment_runner import SWEEP_FRACTIONS
from ate_core.pooling.types import DEFAULT_HISTOGRAM_BINS, PoolKind
from ate_core.trajectory.association import DEFAULT_MAX_TIME_OFFSET
from ate_core.trajectory.types import AlignmentMode, OperatingMode

OUTPUT_ROOT_ENV = "ATE_PREDICT_OUTPUT_ROOT"
DEFAULT_OUTPUT_ROOT = "ate_output"


class SequenceConfig(BaseModel):
    """Input files of one sequence."""
    model_config = ConfigDict(extra="forbid")

    id: str
    estimate_trajectory_path: Path
    ground_truth_path: Path
    frames_index_path: Path
    imu_path: Optional[Path] = None


class TestcaseConfig(BaseModel):
    """A "<mode>-<dataset>" testcase grouping several sequences."""
    model_config = ConfigDict(extra="forbid")

    id: str
    alignment_mode: Optional[str] = None
    sequences: list[SequenceConfig] = Field(min_length=1)

    @field_validator("alignment_mode")
    @classmethod
    def _check_alignment(cls, value: Optional[str]) -> Optional[str]:
        if value is not None:
            AlignmentMode.parse(value)
        return value

    @field_validator("sequences")
    @classmethod
    def _unique_ids(cls, value: list[SequenceConfig]) -> list[SequenceConfig]:
        ids = [s.id for s in value]
        if len(set(ids)) != len(ids):
            raise ValueError(f"Duplicate sequence ids: {ids}")
        return value

    @property
    def alignment(self) -> AlignmentMode:
        """Configured mode, else the default of the id's operating mode, else SE3."""
        if self.alignment_mode is not None:
            return AlignmentMode.parse(self.alignment_mode)
        mode = OperatingMode.from_testcase_id(self.id)
        return mode.default_alignment if mode is not None else AlignmentMode.SE3


class TuningConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n_candidates: int = Field(default=60, ge=1)
    k_folds: int = Field(default=3, ge=2)


class PipelineConfig(BaseModel):
    """
    Complete pipeline configuration.

    Attributes:
        testcases: Testcases with their sequences
        pooling_kind: Pooling kind for train/sweep/characterize
        histogram_bins: Bin count of the diversity pooling kinds
        train_fraction: Sequential split fraction in (0, 1)
        pmcc_threshold: Collinearity threshold in (0, 1]
        tuning: Randomized search budget
        master_seed: Seed every random stream derives from
        output_dir: Output root (flag, file, environment, then "ate_output")
        metrics: Characterization metric names (default: the full set)
        max_time_offset: Association tolerance in seconds
        sweep_fractions: Training fractions of the sweep
        sweep_seeds: Master seeds repeated at every sweep fraction
        n_jobs: joblib workers
    """
    model_config = ConfigDict(extra="forbid")

    testcases: list[TestcaseConfig] = Field(min_length=1)
    pooling_kind: str = "mean"
    histogram_bins: int = Field(default=DEFAULT_HISTOGRAM_BINS, ge=1)
    train_fraction: float = Field(default=0.7, gt=0, lt=1)
    pmcc_threshold: float = Field(default=0.95, gt=0, le=1)
    tuning: TuningConfig = TuningConfig()
    master_seed: int = Field(default=0, ge=0)
    output_dir: Optional[Path] = None
    metrics: Optional[list[str]] = None
    max_time_offset: float = Field(default=DEFAULT_MAX_TIME_OFFSET, gt=0)
    sweep_fractions: list[float] = Field(default_factory=lambda: list(SWEEP_FRACTIONS))
    sweep_seeds: list[int] = Field(default_factory=lambda: [0], min_length=1)
    n_jobs: int = 1

    @field_validator("pooling_kind")
    @classmethod
    def _check_pooling(cls, value: str) -> str:
        return PoolKind.parse(value).value

    @field_validator("sweep_fractions")
    @classmethod
    def _check_fractions(cls, value: list[float]) -> list[float]:
        if not value or any(not 0 < f < 1 for f in value):
            raise ValueError("sweep fractions must lie in (0, 1)")
        return sorted(set(value))

    @field_validator("testcases")
    @classmethod
    def _unique_testcases(cls, value: list[TestcaseConfig]) -> list[TestcaseConfig]:
        ids = [t.id for t in value]
        if len(set(ids)) != len(ids):
            raise ValueError(f"Duplicate testcase ids: {ids}")
        return value

    def hash_payload(self) -> dict[str, Any]:
        """Fields that determine results (worker count and output location excluded)."""
        return self.model_dump(mode="json", exclude={"n_jobs", "output_dir"})


def _resolve(path: Optional[Path], base: Path) -> Optional[Path]:
    if path is None:
        return None
    return path if path.is_absolute() else (base / path).resolve()


def resolve_paths(config: PipelineConfig, base: Path) -> PipelineConfig:
    """Make every input path absolute relative to base."""
    data = config.model_dump()
    for testcase in data["testcases"]:
        for sequence in testcase["sequences"]:
            for key in ("estimate_trajectory_path", "ground_truth_path",
                        "frames_index_path", "imu_path"):
                sequence[key] = _resolve(sequence[key], base)
    data["output_dir"] = _resolve(data["output_dir"], base)
    return PipelineConfig.model_validate(data)


def check_inputs(config: PipelineConfig) -> None:
    """Raise ConfigError naming the first missing input file."""
    for testcase in config.testcases:
        for sequence in testcase.sequences:
            for path in (sequence.estimate_trajectory_path, sequence.ground_truth_path,
                         sequence.frames_index_path, sequence.imu_path):
                if path is not None and not path.exists():
                    raise ConfigError(
                        f"{testcase.id}/{sequence.id}: input file not found: {path}"
                    )


def load_config(path: os.PathLike | str, check_files: bool = True) -> PipelineConfig:
    """
    Read, validate and resolve a config file.

    Raises:
        ConfigError: On unreadable JSON, schema violations or missing inputs
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
        config = PipelineConfig.model_validate(raw)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except (json.JSONDecodeError, ValidationError, ValueError) as exc:
        raise ConfigError(f"invalid config {path}: {exc}") from exc
    config = resolve_paths(config, path.parent.resolve())
    if check_files:
        check_inputs(config)
    return config


def apply_overrides(config: PipelineConfig, **overrides: Any) -> PipelineConfig:
    """Replace single fields (None values are ignored) and validate again."""
    data = config.model_dump()
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return PipelineConfig.model_validate(data)
    except ValidationError as exc:
        raise ConfigError(f"invalid override: {exc}") from exc


def output_root(config: PipelineConfig) -> Path:
    """Output directory: configured value, then the environment, then the default."""
    if config.output_dir is not None:
        return config.output_dir
    return Path(os.environ.get(OUTPUT_ROOT_ENV, DEFAULT_OUTPUT_ROOT)).resolve()
