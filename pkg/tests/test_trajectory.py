import numpy as np
import pytest
from scipy.optimize import minimize
from scipy.spatial.transform import Rotation

from ate_core.errors import (
    AssociationError,
    DegenerateGeometryError,
    EmptyTrajectoryError,
    InsufficientDataError,
    TrajectoryParseError,
)
from ate_core.trajectory import (
    AlignmentMode,
    AlignmentResult,
    Association,
    FrameId,
    OperatingMode,
    Pose,
    SubTrajectoryExample,
    Trajectory,
    align,
    associate,
    compute_ate,
    generate_subtrajectory_examples,
    load_trajectory,
    save_trajectory,
)
from ate_core.trajectory.examples import SKIP_TOO_SHORT

from conftest import make_trajectory, trajectory_from_points, write_tum


class TestTypes:
    def test_pose_normalizes_quaternion(self):
        pose = Pose(0.0, (0, 0, 0), (2.0, 0.0, 0.0, 0.0))
        assert np.linalg.norm(pose.rotation) == pytest.approx(1.0, abs=1e-9)
        assert pose.rotation == (1.0, 0.0, 0.0, 0.0)

    @pytest.mark.parametrize("timestamp", [float("nan"), float("inf"), -1.0])
    def test_pose_rejects_bad_timestamp(self, timestamp):
        with pytest.raises(ValueError):
            Pose(timestamp, (0, 0, 0))

    def test_pose_rejects_zero_quaternion(self):
        with pytest.raises(ValueError):
            Pose(0.0, (0, 0, 0), (0, 0, 0, 0))

    def test_trajectory_requires_increasing_timestamps(self):
        with pytest.raises(ValueError):
            Trajectory((Pose(1.0, (0, 0, 0)), Pose(1.0, (1, 0, 0))))
        with pytest.raises(ValueError):
            Trajectory(())

    def test_association_must_be_monotone(self):
        with pytest.raises(ValueError):
            Association(((0, 1), (1, 0)), 0.02)

    def test_alignment_result_se3_scale(self):
        with pytest.raises(ValueError):
            AlignmentResult(np.eye(3), np.zeros(3), 2.0, AlignmentMode.SE3)
        with pytest.raises(ValueError):
            AlignmentResult(-np.eye(3), np.zeros(3), 1.0, AlignmentMode.SE3)

    def test_example_invariants(self):
        example = SubTrajectoryExample("seq", 4, 0.5)
        assert example.frame_range == (1, 4)
        with pytest.raises(ValueError):
            SubTrajectoryExample("seq", 4, -0.1)
        with pytest.raises(ValueError):
            SubTrajectoryExample("seq", 0, 0.1)
        with pytest.raises(ValueError):
            SubTrajectoryExample("seq", 2, 0.1, skipped=True)

    def test_example_dict_round_trip(self):
        example = SubTrajectoryExample("seq", 2, None, True, SKIP_TOO_SHORT, 0.1)
        assert SubTrajectoryExample.from_dict(example.to_dict()) == example

    @pytest.mark.parametrize("testcase_id,mode,alignment", [
        ("S-KITTI", OperatingMode.STEREO, AlignmentMode.SE3),
        ("M-EuroC", OperatingMode.MONOCULAR, AlignmentMode.SIM3),
        ("M-I-EuroC", OperatingMode.MONOCULAR_INERTIAL, AlignmentMode.SIM3),
        ("S-I-TUMVI", OperatingMode.STEREO_INERTIAL, AlignmentMode.SE3),
    ])
    def test_operating_mode_from_testcase(self, testcase_id, mode, alignment):
        assert OperatingMode.from_testcase_id(testcase_id) is mode
        assert mode.default_alignment is alignment

    def test_operating_mode_unknown_prefix(self):
        assert OperatingMode.from_testcase_id("SYNTH") is None


class TestLoadTrajectory:
    def test_single_identity_pose(self, tmp_path):
        path = write_tum(tmp_path / "t.txt", ["0.0 0 0 0 0 0 0 1"])
        trajectory = load_trajectory(path)
        assert len(trajectory) == 1
        pose = trajectory.poses[0]
        assert pose.timestamp == 0.0
        assert pose.translation == (0.0, 0.0, 0.0)
        assert pose.rotation == (1.0, 0.0, 0.0, 0.0)

    def test_sorts_and_skips_comments(self, tmp_path):
        path = write_tum(tmp_path / "t.txt", [
            "# timestamp tx ty tz qx qy qz qw",
            "2.0 2 0 0 0 0 0 1",
            "",
            "1.0 1 0 0 0 0 0 1",
            "0.5 0 0 0 0 0 0 1",
        ])
        trajectory = load_trajectory(path, frame_id=FrameId.GROUND_TRUTH)
        assert list(trajectory.timestamps) == [0.5, 1.0, 2.0]
        assert trajectory.positions[:, 0].tolist() == [0.0, 1.0, 2.0]
        assert trajectory.frame_id is FrameId.GROUND_TRUTH

    def test_arity_error_names_line(self, tmp_path):
        path = write_tum(tmp_path / "t.txt", ["0.0 0 0 0"])
        with pytest.raises(TrajectoryParseError) as info:
            load_trajectory(path)
        assert info.value.line_number == 1

    def test_non_numeric_line(self, tmp_path):
        path = write_tum(tmp_path / "t.txt", ["0.0 0 0 0 0 0 0 1", "1.0 a 0 0 0 0 0 1"])
        with pytest.raises(TrajectoryParseError) as info:
            load_trajectory(path)
        assert info.value.line_number == 2

    def test_empty_file(self, tmp_path):
        path = write_tum(tmp_path / "t.txt", ["# only a comment"])
        with pytest.raises(EmptyTrajectoryError):
            load_trajectory(path)

    def test_save_then_load(self, tmp_path):
        trajectory = make_trajectory(12, seed=3)
        save_trajectory(trajectory, tmp_path / "t.txt")
        loaded = load_trajectory(tmp_path / "t.txt")
        assert np.array_equal(loaded.positions, trajectory.positions)
        assert np.array_equal(loaded.timestamps, trajectory.timestamps)


class TestAssociate:
    def test_identical_timestamps(self):
        est = make_trajectory(8)
        gt = make_trajectory(8, seed=1, frame_id=FrameId.GROUND_TRUTH)
        association = associate(est, gt, 0.01)
        assert association.pairs == tuple((i, i) for i in range(8))

    def test_all_beyond_offset(self):
        est = make_trajectory(5, start=0.5)
        gt = make_trajectory(5)
        with pytest.raises(AssociationError):
            associate(est, gt, 0.02)

    def test_greedy_nearest(self):
        est = trajectory_from_points(np.zeros((2, 3)), [0.0, 1.0])
        gt = trajectory_from_points(np.zeros((3, 3)), [0.001, 0.9, 1.001])
        assert associate(est, gt, 0.01).pairs == ((0, 0), (1, 2))

    def test_each_pose_used_once(self):
        est = trajectory_from_points(np.zeros((2, 3)), [1.0, 1.005])
        gt = trajectory_from_points(np.zeros((1, 3)), [1.004])
        assert associate(est, gt, 0.01).pairs == ((1, 0),)

    def test_pairs_monotone_and_within_offset(self, rng):
        t_est = np.sort(rng.uniform(0, 10, 60))
        t_gt = np.sort(rng.uniform(0, 10, 80))
        t_est = np.unique(t_est)
        t_gt = np.unique(t_gt)
        est = trajectory_from_points(np.zeros((len(t_est), 3)), t_est)
        gt = trajectory_from_points(np.zeros((len(t_gt), 3)), t_gt)
        association = associate(est, gt, 0.1)
        for (i0, j0), (i1, j1) in zip(association.pairs, association.pairs[1:]):
            assert i1 > i0 and j1 > j0
        for i, j in association.pairs:
            assert abs(t_est[i] - t_gt[j]) <= 0.1

    def test_negative_offset(self):
        with pytest.raises(ValueError):
            associate(make_trajectory(3), make_trajectory(3), -1.0)


class TestAlign:
    def test_identity(self, rng):
        points = rng.normal(size=(10, 3))
        result = align(points, points)
        assert np.allclose(result.rotation, np.eye(3), atol=1e-9)
        assert np.allclose(result.translation, 0.0, atol=1e-9)
        assert result.scale == 1.0

    def test_pure_translation(self, rng):
        estimate = rng.normal(size=(10, 3))
        truth = estimate + np.array([1.0, 2.0, 3.0])
        result = align(estimate, truth)
        assert np.allclose(result.rotation, np.eye(3), atol=1e-9)
        assert np.allclose(result.translation, [1.0, 2.0, 3.0], atol=1e-9)
        assert result.scale == 1.0

    def test_pure_scale_sim3(self, rng):
        truth = rng.normal(size=(10, 3))
        result = align(2.0 * truth, truth, "Sim3")
        assert result.scale == pytest.approx(0.5, abs=1e-9)
        assert np.allclose(result.rotation, np.eye(3), atol=1e-9)
        assert np.allclose(result.translation, 0.0, atol=1e-9)

    def test_recovers_rigid_motion(self, rng):
        estimate = rng.normal(size=(20, 3))
        rotation = Rotation.random(random_state=7).as_matrix()
        truth = estimate @ rotation.T + np.array([0.3, -1.0, 2.0])
        result = align(estimate, truth)
        assert np.allclose(result.rotation, rotation, atol=1e-9)
        assert np.linalg.det(result.rotation) == pytest.approx(1.0, abs=1e-9)

    def test_too_few_points(self):
        with pytest.raises(InsufficientDataError):
            align(np.eye(3)[:2], np.eye(3)[:2])

    def test_coincident_points(self):
        points = np.ones((5, 3))
        with pytest.raises(DegenerateGeometryError):
            align(points, points)

    def test_collinear_points_are_valid(self):
        points = np.outer(np.arange(5.0), [1.0, 0.0, 0.0])
        result = align(points, points + 1.0)
        assert np.allclose(result.apply(points), points + 1.0, atol=1e-9)

    def test_size_mismatch(self):
        with pytest.raises(ValueError):
            align(np.zeros((4, 3)), np.zeros((5, 3)))

    def test_beats_random_candidates(self):
        gen = np.random.default_rng(99)
        for trial in range(20):
            estimate = gen.normal(size=(4, 3))
            truth = gen.normal(size=(4, 3))
            for mode in (AlignmentMode.SE3, AlignmentMode.SIM3):
                result = align(estimate, truth, mode)
                best = np.sum((truth - result.apply(estimate)) ** 2)
                rotations = Rotation.random(1000, random_state=trial).as_matrix()
                translations = gen.normal(size=(1000, 3))
                scales = (np.ones(1000) if mode is AlignmentMode.SE3
                          else gen.uniform(0.1, 3.0, 1000))
                moved = scales[:, None, None] * np.einsum("kij,nj->kni", rotations, estimate)
                moved += translations[:, None, :]
                costs = np.sum((truth[None] - moved) ** 2, axis=(1, 2))
                assert best <= costs.min() + 1e-9


class TestComputeAte:
    def test_self_comparison(self):
        trajectory = make_trajectory(30)
        assert compute_ate(trajectory, trajectory) == pytest.approx(0.0, abs=1e-9)

    def test_rigid_invariance(self):
        gen = np.random.default_rng(5)
        for trial in range(100):
            truth = make_trajectory(int(gen.integers(10, 201)), seed=trial,
                                    frame_id=FrameId.GROUND_TRUTH)
            rotation = Rotation.random(random_state=trial).as_matrix()
            moved = truth.transformed(rotation, gen.normal(scale=5.0, size=3))
            assert compute_ate(moved, truth, AlignmentMode.SE3) <= 1e-9

    def test_sim3_never_worse_than_se3(self):
        for seed in range(20):
            estimate = make_trajectory(25, seed=seed)
            truth = make_trajectory(25, seed=seed + 100, frame_id=FrameId.GROUND_TRUTH)
            se3 = compute_ate(estimate, truth, AlignmentMode.SE3)
            sim3 = compute_ate(estimate, truth, AlignmentMode.SIM3)
            assert sim3 <= se3 + 1e-9

    def test_perturbed_planar_matches_numeric_optimum(self):
        truth_points = np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0],
                                 [1.0, 1.0, 0.0], [0.0, 1.0, 0.0]])
        estimate_points = truth_points.copy()
        estimate_points[2, 0] += 0.1
        estimate = trajectory_from_points(estimate_points)
        truth = trajectory_from_points(truth_points, frame_id=FrameId.GROUND_TRUTH)

        def cost(params):
            rotation = Rotation.from_rotvec(params[:3]).as_matrix()
            moved = estimate_points @ rotation.T + params[3:]
            return np.mean(np.sum((truth_points - moved) ** 2, axis=1))

        optimum = minimize(cost, np.zeros(6), method="BFGS", options={"gtol": 1e-12})
        expected = float(np.sqrt(optimum.fun))
        assert compute_ate(estimate, truth) == pytest.approx(expected, abs=1e-6)
        assert 0.0 < expected < 0.1


class TestSubTrajectoryExamples:
    def test_one_example_per_keyframe(self):
        estimate = make_trajectory(5)
        truth = make_trajectory(5, seed=1, frame_id=FrameId.GROUND_TRUTH)
        examples = generate_subtrajectory_examples(estimate, truth, sequence_id="s")
        assert [e.cutoff_k for e in examples] == [1, 2, 3, 4, 5]
        assert [e.skipped for e in examples] == [True, True, False, False, False]
        assert all(e.sequence_id == "s" for e in examples)

    def test_single_keyframe_is_skipped(self):
        trajectory = make_trajectory(1)
        (example,) = generate_subtrajectory_examples(trajectory, trajectory)
        assert example.skipped
        assert example.ate is None
        assert example.skip_reason == SKIP_TOO_SHORT

    def test_identical_trajectories_have_zero_ate(self):
        trajectory = make_trajectory(10)
        examples = generate_subtrajectory_examples(trajectory, trajectory)
        assert len(examples) == 10
        for example in examples[2:]:
            assert example.ate == pytest.approx(0.0, abs=1e-9)

    def test_labels_match_prefix_ate(self):
        estimate = make_trajectory(15, seed=2)
        truth = make_trajectory(15, seed=3, frame_id=FrameId.GROUND_TRUTH)
        examples = generate_subtrajectory_examples(estimate, truth, "Sim3")
        for example in examples[2:]:
            k = example.cutoff_k
            expected = compute_ate(estimate.prefix(k), truth, "Sim3")
            assert example.ate == pytest.approx(expected, abs=1e-12)

    def test_degenerate_prefix_is_skipped(self):
        points = np.vstack([np.zeros((3, 3)), np.eye(3)])
        trajectory = trajectory_from_points(points)
        examples = generate_subtrajectory_examples(trajectory, trajectory)
        assert examples[2].skipped
        assert not examples[3].skipped

    def test_parallel_matches_serial(self):
        estimate = make_trajectory(20, seed=4)
        truth = make_trajectory(20, seed=5, frame_id=FrameId.GROUND_TRUTH)
        serial = generate_subtrajectory_examples(estimate, truth, n_jobs=1)
        parallel = generate_subtrajectory_examples(estimate, truth, n_jobs=2)
        assert serial == parallel
