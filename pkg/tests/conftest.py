"""
Shared fixtures and builders for the test suite.
"""

from pathlib import Path
from typing import Optional

import numpy as np
import pytest

from ate_core.features.types import Dataset
from ate_core.regress import tuning
from ate_core.trajectory.types import FrameId, Pose, Trajectory


def make_trajectory(
    n: int,
    seed: int = 0,
    start: float = 0.0,
    period: float = 0.1,
    frame_id: FrameId = FrameId.ESTIMATE,
) -> Trajectory:
    """Random-walk trajectory with n poses and identity orientations."""
    rng = np.random.default_rng(seed)
    positions = np.cumsum(rng.normal(scale=0.5, size=(n, 3)), axis=0)
    poses = tuple(
        Pose(start + period * i, tuple(p)) for i, p in enumerate(positions)
    )
    return Trajectory(poses, frame_id)


def trajectory_from_points(points, timestamps=None,
                           frame_id: FrameId = FrameId.ESTIMATE) -> Trajectory:
    points = np.asarray(points, dtype=np.float64)
    if timestamps is None:
        timestamps = [0.1 * i for i in range(len(points))]
    return Trajectory(tuple(Pose(t, tuple(p)) for t, p in zip(timestamps, points)), frame_id)


def write_tum(path: Path, lines: list[str]) -> Path:
    path.write_text("\n".join(lines) + "\n", encoding="ascii")
    return path


def make_dataset(
    n_sequences: int = 6,
    per_sequence: int = 10,
    width: int = 3,
    seed: int = 0,
    noise: float = 0.0,
    testcase_id: str = "S-TEST",
    target: Optional[callable] = None,
) -> Dataset:
    """
    Dataset with a smooth known target.

    Default target: y = 1 + 2 x0 + x1^2 (other columns are distractors).
    """
    rng = np.random.default_rng(seed)
    n = n_sequences * per_sequence
    X = rng.uniform(0.0, 1.0, size=(n, width))
    if target is None:
        y = 1.0 + 2.0 * X[:, 0] + (X[:, 1] ** 2 if width > 1 else 0.0)
    else:
        y = target(X)
    if noise:
        y = y + rng.normal(scale=noise, size=n)
    y = np.abs(y)
    ids = [f"seq{i // per_sequence:02d}" for i in range(n)]
    cutoffs = [i % per_sequence + 1 for i in range(n)]
    return Dataset.from_arrays(X, y, ids, cutoffs, testcase_id=testcase_id)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


@pytest.fixture
def dataset() -> Dataset:
    return make_dataset()


def cap_forest_sizes(monkeypatch: pytest.MonkeyPatch, limit: int = 20) -> None:
    """Cap sampled forest sizes so tuning stays quick."""
    original = tuning.sample_candidates

    def capped(n_candidates, rng_seed=0):
        return [
            hp.model_copy(update={"n_estimators": min(hp.n_estimators, limit)})
            for hp in original(n_candidates, rng_seed)
        ]

    monkeypatch.setattr(tuning, "sample_candidates", capped)


@pytest.fixture
def small_forests(monkeypatch):
    cap_forest_sizes(monkeypatch)
