"""
Synthetic sequence corpus with a known ATE-vs-feature relationship.

Each sequence has grayscale PGM frames, an IMU CSV, a ground-truth TUM
trajectory and an estimate TUM trajectory. Every frame is a keyframe. The
estimate deviates from the truth by vertical offsets of alternating sign,
sized so that the RMSE of the first k offsets follows

    T_k = F(mean darkness of frames 1..k, mean rotation rate of frames 1..k)

with multiplicative noise, where F is a steep sigmoid in darkness scaled by
the rotation rate. The estimate is finally moved by a random rigid transform,
which the SE3 alignment undoes. Darkening along a sequence makes the error
grow superlinearly.
"""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import pandas as pd
from scipy.spatial.transform import Rotation

from ..atomic import write_csv, write_image
from ..rng import derive_rng
from ..trajectory.io import save_trajectory
from ..trajectory.types import FrameId, Pose, Trajectory

logger = logging.getLogger(__name__)

FRAME_PERIOD = 0.1
IMU_PER_FRAME = 4
GRAVITY = 9.81
MAX_GYRO = 1.0


@dataclass(frozen=True)
class SynthSettings:
    """
    Corpus generation parameters.

    Attributes:
        n_sequences: Number of sequences
        min_keyframes / max_keyframes: Inclusive range of sequence lengths
        image_size: Side of the square frames in pixels
        noise: Relative multiplicative noise on the target ATE (0.05 = 5 %)
        darkening: Brightness lost over a sequence, as a fraction of 255
    """
    n_sequences: int = 20
    min_keyframes: int = 40
    max_keyframes: int = 60
    image_size: int = 16
    noise: float = 0.05
    darkening: float = 0.3

    def __post_init__(self):
        if self.n_sequences < 1:
            raise ValueError("n_sequences must be positive")
        if not 3 <= self.min_keyframes <= self.max_keyframes:
            raise ValueError("keyframe range must satisfy 3 <= min <= max")
        if self.image_size < 8:
            raise ValueError("image_size must be at least 8")
        if self.noise < 0 or not 0 <= self.darkening < 1:
            raise ValueError("noise must be >= 0 and darkening in [0, 1)")


@dataclass(frozen=True)
class SynthSequence:
    """Paths of one generated sequence (relative to the corpus root)."""
    sequence_id: str
    estimate_trajectory_path: str
    ground_truth_path: str
    frames_index_path: str
    imu_path: str


def target_ate(darkness: float, rotation_rate: float) -> float:
    """ATE in meters as a function of mean darkness in [0, 1] and mean rotation rate."""
    gate = 1.0 / (1.0 + np.exp(-12.0 * (darkness - 0.55)))
    return float(0.05 + 0.5 * gate * (0.6 + 0.4 * min(rotation_rate, MAX_GYRO) / MAX_GYRO))


def offset_magnitudes(targets: np.ndarray) -> np.ndarray:
    """
    Per-pose offsets whose running RMSE follows the targets where it can.

    targets[k-1] is the wanted RMSE of the first k offsets (k >= 3). When a
    target falls faster than the accumulated offsets allow, the running RMSE
    stays above it.
    """
    n = targets.shape[0]
    offsets = np.zeros(n)
    offsets[:3] = targets[2]
    accumulated = 3 * targets[2] ** 2
    for k in range(4, n + 1):
        offsets[k - 1] = np.sqrt(max(0.0, k * targets[k - 1] ** 2 - accumulated))
        accumulated += offsets[k - 1] ** 2
    return offsets


def _ground_truth(rng: np.random.Generator, timestamps: np.ndarray) -> Trajectory:
    radius = rng.uniform(5.0, 10.0)
    omega = rng.uniform(0.1, 0.3)
    phase = rng.uniform(0, 2 * np.pi)
    angle = omega * timestamps + phase
    positions = np.column_stack([
        radius * np.cos(angle),
        radius * np.sin(angle),
        0.3 * np.sin(0.5 * timestamps),
    ])
    quats = Rotation.from_euler("z", angle + np.pi / 2).as_quat()
    return Trajectory(
        tuple(
            Pose(float(t), tuple(p), (q[3], q[0], q[1], q[2]))
            for t, p, q in zip(timestamps, positions, quats)
        ),
        FrameId.GROUND_TRUTH,
    )


def generate_sequence(
    root: Path, index: int, settings: SynthSettings, master_seed: int
) -> SynthSequence:
    """Write one sequence under root/<sequence_id>/."""
    rng = derive_rng(master_seed, "synth", index)
    sequence_id = f"seq{index:02d}"
    directory = root / sequence_id
    (directory / "frames").mkdir(parents=True, exist_ok=True)

    n = int(rng.integers(settings.min_keyframes, settings.max_keyframes + 1))
    steps = np.arange(n)
    timestamps = np.round(1.0 + steps * FRAME_PERIOD, 6)
    progress = steps / max(n - 1, 1)

    base = rng.uniform(70.0, 210.0)
    wobble = rng.uniform(0, 2 * np.pi)
    brightness = np.clip(
        base - 255.0 * settings.darkening * progress + 10.0 * np.sin(wobble + steps / 5.0),
        20.0, 235.0,
    )
    gyro = np.clip(
        rng.uniform(0.1, 0.9) + 0.15 * np.sin(rng.uniform(0, 2 * np.pi) + steps / 7.0),
        0.0, MAX_GYRO,
    )
    contrast = rng.uniform(10.0, 40.0)

    rows = []
    for j in steps:
        pixels = brightness[j] + contrast * rng.standard_normal(
            (settings.image_size, settings.image_size)
        )
        name = f"frames/{j:06d}.pgm"
        write_image(directory / name, np.clip(np.rint(pixels), 0, 255).astype(np.uint8))
        rows.append((timestamps[j], name))
    write_csv(directory / "index.csv",
              pd.DataFrame(rows, columns=["timestamp", "image_path"]), float_format=None)

    imu_rows = []
    for j in steps:
        start = timestamps[j] - FRAME_PERIOD
        for s in range(1, IMU_PER_FRAME + 1):
            axis = rng.standard_normal(3)
            axis /= np.linalg.norm(axis)
            w = gyro[j] * axis
            a = np.array([0.0, 0.0, GRAVITY]) + 0.1 * rng.standard_normal(3)
            imu_rows.append((round(start + s * FRAME_PERIOD / IMU_PER_FRAME, 6), *w, *a))
    imu = pd.DataFrame(imu_rows, columns=["timestamp", "gx", "gy", "gz", "ax", "ay", "az"])
    write_csv(directory / "imu.csv", imu, float_format=None)

    darkness = 1.0 - brightness / 255.0
    counts = steps + 1
    mean_dark = np.cumsum(darkness) / counts
    mean_gyro = np.cumsum(gyro) / counts
    targets = np.array([target_ate(d, g) for d, g in zip(mean_dark, mean_gyro)])
    targets *= 1.0 + settings.noise * rng.standard_normal(n)
    offsets = offset_magnitudes(np.maximum(targets, 1e-3))

    truth = _ground_truth(rng, timestamps)
    signs = np.where(steps % 2 == 0, 1.0, -1.0)
    perturbed = truth.positions + np.column_stack([np.zeros(n), np.zeros(n), signs * offsets])
    estimate = Trajectory(
        tuple(Pose(p.timestamp, tuple(x), p.rotation) for p, x in zip(truth.poses, perturbed)),
        FrameId.ESTIMATE,
    )
    world = Rotation.random(random_state=rng).as_matrix()
    estimate = estimate.transformed(world, rng.uniform(-5.0, 5.0, size=3))

    save_trajectory(truth, directory / "groundtruth.txt")
    save_trajectory(estimate, directory / "estimate.txt")
    logger.debug("Generated %s with %d keyframes", sequence_id, n)
    return SynthSequence(
        sequence_id=sequence_id,
        estimate_trajectory_path=f"{sequence_id}/estimate.txt",
        ground_truth_path=f"{sequence_id}/groundtruth.txt",
        frames_index_path=f"{sequence_id}/index.csv",
        imu_path=f"{sequence_id}/imu.csv",
    )


def generate_corpus(
    root: Union[str, Path], settings: SynthSettings = SynthSettings(), master_seed: int = 0
) -> list[SynthSequence]:
    """
    Generate a corpus of sequences under root.

    Args:
        root: Output directory (created if needed)
        settings: Generation parameters
        master_seed: Seed; sequence i draws from its own derived stream

    Returns:
        The generated sequences in order
    """
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    sequences = [generate_sequence(root, i, settings, master_seed)
                 for i in range(settings.n_sequences)]
    logger.info("Generated %d synthetic sequences in %s", len(sequences), root)
    return sequences
