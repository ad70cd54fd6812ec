import cv2
import numpy as np
import pandas as pd
import pytest

from ate_core.characterization import (
    DEFAULT_METRICS,
    CharacterizationMatrix,
    CharacterizationMetric,
    Frame,
    MetricRegistry,
    characterize_frame,
    characterize_sequence,
    load_matrix,
    load_sequence,
    register_metric,
    save_matrix,
)
from ate_core.characterization.types import Modality
from ate_core.errors import CharacterizationError

IMAGE_ONLY = ["brightness", "contrast", "image_entropy", "laplacian_variance",
              "gradient_magnitude", "underexposure", "overexposure"]


def metric_values(frame, names=IMAGE_ONLY):
    values = characterize_frame(frame, names).values
    return dict(zip(names, values))


def checkerboard(size=16):
    rows, cols = np.indices((size, size))
    return np.where((rows + cols) % 2 == 0, 0, 255).astype(np.uint8)


def naive_laplacian_variance(image):
    padded = np.pad(image.astype(np.float64), 1)
    h, w = image.shape
    response = np.zeros((h, w))
    for i in range(h):
        for j in range(w):
            response[i, j] = (padded[i, j + 1] + padded[i + 2, j + 1] + padded[i + 1, j]
                              + padded[i + 1, j + 2] - 4 * padded[i + 1, j + 1])
    return response.var()


class TestFrame:
    def test_needs_some_modality(self):
        with pytest.raises(ValueError):
            Frame(0.0)

    def test_minimum_image_size(self):
        with pytest.raises(ValueError):
            Frame(0.0, pixels=np.zeros((4, 16), dtype=np.uint8))

    def test_rejects_out_of_range_intensities(self):
        with pytest.raises(ValueError):
            Frame(0.0, pixels=np.full((8, 8), 300))


class TestCharacterizeFrame:
    def test_uniform_gray(self):
        values = metric_values(Frame(0.0, pixels=np.full((16, 16), 128, dtype=np.uint8)))
        assert values["brightness"] == 128.0
        assert values["contrast"] == 0.0
        assert values["image_entropy"] == 0.0
        assert values["underexposure"] == 0.0
        assert values["overexposure"] == 0.0

    def test_checkerboard(self):
        values = metric_values(Frame(0.0, pixels=checkerboard()))
        assert values["brightness"] == pytest.approx(127.5)
        assert values["contrast"] == pytest.approx(127.5)
        assert values["image_entropy"] == pytest.approx(1.0)
        assert values["underexposure"] == pytest.approx(0.5)
        assert values["overexposure"] == pytest.approx(0.5)

    def test_laplacian_matches_naive_convolution(self, rng):
        image = rng.integers(0, 256, size=(16, 16)).astype(np.uint8)
        values = metric_values(Frame(0.0, pixels=image), ["laplacian_variance"])
        assert values["laplacian_variance"] == pytest.approx(
            naive_laplacian_variance(image), rel=1e-9
        )

    def test_value_ranges(self, rng):
        for _ in range(10):
            image = rng.integers(0, 256, size=(20, 24)).astype(np.uint8)
            values = metric_values(Frame(0.0, pixels=image))
            assert 0 <= values["brightness"] <= 255
            assert 0 <= values["contrast"] <= 127.5
            assert 0 <= values["image_entropy"] <= 8
            assert 0 <= values["underexposure"] <= 1
            assert 0 <= values["overexposure"] <= 1

    def test_imu_metrics(self):
        window = np.array([[3.0, 4.0, 0.0, 0.0, 0.0, 9.0],
                           [0.0, 0.0, 1.0, 0.0, 9.0, 0.0]])
        names = ["gyro_mean", "accel_mean", "gyro_std"]
        result = characterize_frame(Frame(0.0, imu_window=window), names)
        assert result.values.tolist() == pytest.approx([3.0, 9.0, 2.0])
        assert result.coverage.all()

    def test_missing_modality_is_neutral_and_flagged(self):
        frame = Frame(0.0, pixels=np.full((8, 8), 50, dtype=np.uint8))
        result = characterize_frame(frame)
        assert len(result.values) == len(DEFAULT_METRICS)
        imu_rows = [DEFAULT_METRICS.index(n) for n in ("gyro_mean", "accel_mean", "gyro_std")]
        assert all(result.values[i] == 0.0 for i in imu_rows)
        assert not result.coverage[imu_rows].any()
        assert result.coverage[0]

    def test_no_applicable_metric(self):
        frame = Frame(0.0, imu_window=np.zeros((2, 6)))
        with pytest.raises(CharacterizationError):
            characterize_frame(frame, ["brightness"])

    def test_empty_metric_set(self):
        frame = Frame(0.0, pixels=np.zeros((8, 8), dtype=np.uint8))
        with pytest.raises(ValueError):
            characterize_frame(frame, [])

    def test_unknown_metric(self):
        with pytest.raises(KeyError):
            MetricRegistry.get("no_such_metric")


class TestRegistry:
    def test_default_set_registered(self):
        for name in DEFAULT_METRICS:
            assert MetricRegistry.is_registered(name)
        assert len(DEFAULT_METRICS) == 10

    def test_custom_metric(self):
        @register_metric("test_constant_metric")
        class ConstantMetric(CharacterizationMetric):
            modality = Modality.IMAGE

            def compute(self, frame):
                return 42.0

        frame = Frame(0.0, pixels=np.zeros((8, 8), dtype=np.uint8))
        assert ConstantMetric.name == "test_constant_metric"
        result = characterize_frame(frame, ["brightness", "test_constant_metric"])
        assert result.values.tolist() == [0.0, 42.0]


class TestCharacterizeSequence:
    def frames(self, rng, n):
        return [
            Frame(0.1 * j, pixels=rng.integers(0, 256, size=(12, 12)).astype(np.uint8),
                  imu_window=rng.normal(size=(3, 6)))
            for j in range(n)
        ]

    def test_single_frame(self, rng):
        matrix = characterize_sequence(self.frames(rng, 1))
        assert matrix.values.shape == (10, 1)
        assert matrix.metric_names == DEFAULT_METRICS

    def test_identical_frames(self):
        frame = Frame(0.0, pixels=checkerboard())
        frames = [frame] * 4
        matrix = characterize_sequence(frames, IMAGE_ONLY)
        assert np.all(matrix.values == matrix.values[:, :1])

    def test_prefix_property(self, rng):
        frames = self.frames(rng, 8)
        full = characterize_sequence(frames)
        for k in (1, 3, 8):
            prefix = characterize_sequence(frames[:k])
            assert np.array_equal(prefix.values, full.values[:, :k])
            assert np.array_equal(full.prefix(k).values, prefix.values)

    def test_column_independence(self, rng):
        frames = self.frames(rng, 6)
        shuffled = [frames[0]] + frames[1:][::-1]
        a = characterize_sequence(frames)
        b = characterize_sequence(shuffled)
        assert np.array_equal(a.values[:, 0], b.values[:, 0])

    def test_parallel_matches_serial(self, rng):
        frames = self.frames(rng, 6)
        serial = characterize_sequence(frames, n_jobs=1)
        parallel = characterize_sequence(frames, n_jobs=2)
        assert np.array_equal(serial.values, parallel.values)

    def test_error_names_frame(self, rng):
        frames = self.frames(rng, 2) + [Frame(0.3, imu_window=np.zeros((0, 6)))]
        with pytest.raises(CharacterizationError) as info:
            characterize_sequence(frames)
        assert info.value.frame_index == 2

    def test_no_frames(self):
        with pytest.raises(CharacterizationError):
            characterize_sequence([])


class TestMatrix:
    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            CharacterizationMatrix(np.array([[1.0, np.nan]]), ("a",), "s")

    def test_row_count_must_match_names(self):
        with pytest.raises(ValueError):
            CharacterizationMatrix(np.zeros((2, 3)), ("a",), "s")

    def test_save_and_load(self, tmp_path, rng):
        matrix = CharacterizationMatrix(rng.normal(size=(3, 5)), ("a", "b", "c"), "s",
                                        timestamps=np.arange(5) * 0.1)
        save_matrix(matrix, tmp_path / "m.csv")
        loaded = load_matrix(tmp_path / "m.csv", "s")
        assert loaded.metric_names == ("a", "b", "c")
        assert np.array_equal(loaded.values, matrix.values)
        assert np.array_equal(loaded.timestamps, matrix.timestamps)


class TestLoadSequence:
    def test_images_and_imu_windows(self, tmp_path, rng):
        names = []
        for j in range(3):
            name = f"frame{j}.pgm"
            cv2.imwrite(str(tmp_path / name), rng.integers(0, 256, (10, 10)).astype(np.uint8))
            names.append(name)
        pd.DataFrame({"timestamp": [0.2, 0.0, 0.1], "image_path": [names[2], names[0], names[1]]}
                     ).to_csv(tmp_path / "index.csv", index=False)
        imu = pd.DataFrame({
            "timestamp": [0.0, 0.05, 0.1, 0.15, 0.2],
            "gx": [1.0] * 5, "gy": [0.0] * 5, "gz": [0.0] * 5,
            "ax": [0.0] * 5, "ay": [0.0] * 5, "az": [9.81] * 5,
        })
        imu.to_csv(tmp_path / "imu.csv", index=False)

        frames = load_sequence(tmp_path / "index.csv", tmp_path / "imu.csv")
        assert [f.timestamp for f in frames] == [0.0, 0.1, 0.2]
        assert [f.imu_window.shape[0] for f in frames] == [1, 2, 2]
        decoded = cv2.imread(str(tmp_path / names[1]), cv2.IMREAD_GRAYSCALE)
        assert np.array_equal(frames[1].pixels, decoded)

    def test_unreadable_image(self, tmp_path):
        (tmp_path / "bad.pgm").write_text("not an image")
        pd.DataFrame({"timestamp": [0.0], "image_path": ["bad.pgm"]}).to_csv(
            tmp_path / "index.csv", index=False)
        with pytest.raises(CharacterizationError):
            load_sequence(tmp_path / "index.csv")
