import numpy as np
import pytest

from conftest import make_dataset
from ate_core.characterization import CharacterizationMatrix
from ate_core.experiment_runner import MODEL_KINDS, SWEEP_FRACTIONS, ExperimentRunner
from ate_core.features import Dataset
from ate_core.pooling import PoolKind, pool, pool_kinds
from ate_core.regress import Hyperparameters

SMALL = Hyperparameters(n_estimators=10, max_depth=10)


pytestmark = pytest.mark.usefixtures("small_forests")


@pytest.fixture
def runner():
    return ExperimentRunner(n_candidates=2, k_folds=3)


def pooled_datasets(n_sequences=10, per_sequence=10, columns=20, seed=0):
    """One dataset per pooling kind; the target is the mean of each matrix row."""
    rng = np.random.default_rng(seed)
    matrices, y, ids, cutoffs = [], [], [], []
    for i in range(n_sequences * per_sequence):
        mu = rng.uniform(0.0, 1.0)
        spread = rng.uniform(0.0, 2.0)
        values = mu + spread * rng.normal(size=(1, columns))
        matrices.append(CharacterizationMatrix(values, ("brightness",), f"seq{i}"))
        y.append(float(values.mean()) + 3.0)
        ids.append(f"seq{i // per_sequence:02d}")
        cutoffs.append(i % per_sequence + 1)
    datasets = {}
    for kind in pool_kinds():
        descriptors = [pool(m, kind) for m in matrices]
        X = np.vstack([d.values for d in descriptors])
        datasets[kind.value] = Dataset.from_arrays(
            X, y, ids, cutoffs, descriptors[0].feature_names, testcase_id="S-POOL"
        )
    return datasets


class TestTraining:
    def test_train_and_evaluate(self, runner, dataset):
        result = runner.train_and_evaluate(dataset, 0.7, rng_seed=0, pooling_kind="mean")
        assert result.report.testcase_id == "S-TEST"
        assert result.report.pooling_kind == "mean"
        assert result.report.train_fraction == 0.7
        assert result.report.model_kind == "forest"
        assert result.report.partition_hash
        assert result.report.n == 10
        assert len(result.cv_report.candidates) == 2
        assert result.bundle.metadata["n_train"] == 50
        assert result.bundle.metadata["hyperparameters"] == result.cv_report.best.model_dump()

    def test_fixed_hyperparameters_skip_tuning(self, runner, dataset):
        result = runner.train_and_evaluate(dataset, 0.5, hyperparameters=SMALL)
        assert result.cv_report is None
        assert len(result.bundle.regressor.trees) == 10

    def test_mask_fitted_on_training_side(self, runner):
        base = make_dataset(width=2, seed=3)
        X = np.column_stack([base.X, 3.0 * base.X[:, 0] + 1.0])
        data = Dataset.from_arrays(X, base.y, base.sequence_ids, base.cutoffs)
        bundle, _ = runner.train(data, hyperparameters=SMALL)
        assert bundle.feature_mask.kept_indices == (0, 1)
        assert bundle.raw_width == 3
        assert bundle.predict(X).shape == (len(data),)

    def test_deterministic_across_jobs(self, dataset):
        serial = ExperimentRunner(n_candidates=2, n_jobs=1).train_and_evaluate(dataset, 0.7, 4)
        parallel = ExperimentRunner(n_candidates=2, n_jobs=2).train_and_evaluate(dataset, 0.7, 4)
        assert serial.cv_report.best == parallel.cv_report.best
        assert np.array_equal(serial.bundle.predict(dataset.X), parallel.bundle.predict(dataset.X))


class TestSweep:
    def test_default_fractions(self):
        assert SWEEP_FRACTIONS == (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)

    def test_reference_row_matches_standard_path(self, runner, dataset):
        sweep = runner.sweep_train_fraction(dataset, (0.7,), seeds=(0,), pooling_kind="mean")
        standard = runner.train_and_evaluate(dataset, 0.7, 0, "mean").report
        row = sweep.row_at(0.7).reports[0]
        assert row.r2 == standard.r2
        assert row.partition_hash == standard.partition_hash

    def test_unsplittable_fraction_is_failed_row(self, runner):
        data = make_dataset(n_sequences=2, per_sequence=10)
        sweep = runner.sweep_train_fraction(data, (0.9, 0.3), seeds=(0,))
        assert sweep.fractions == [0.3, 0.9]
        assert sweep.row_at(0.9).n_failed == 1
        assert "test side" in sweep.row_at(0.9).reports[0].error
        assert sweep.row_at(0.3).reports[0].n == 10

    def test_more_training_data_helps(self):
        data = make_dataset(n_sequences=10, per_sequence=8, noise=0.05, seed=21)
        sweep = ExperimentRunner(n_candidates=1).sweep_train_fraction(
            data, (0.1, 0.9), seeds=range(5)
        )
        low, high = sweep.row_at(0.1), sweep.row_at(0.9)
        assert len(low.reports) == 5
        assert high.median_r2 >= low.median_r2
        assert set(sweep.relative_change(0.9)) == {0.1, 0.9}


class TestModelComparison:
    def test_identical_partition(self, runner, dataset):
        comparison = runner.compare_models(dataset)
        assert list(comparison.reports) == list(MODEL_KINDS)
        hashes = {reports[0].partition_hash for reports in comparison.reports.values()}
        assert len(hashes) == 1

    def test_forest_beats_dummy(self, runner):
        data = make_dataset(n_sequences=8, noise=0.05, seed=5)
        reports = runner.compare_models(data).reports
        assert reports["forest"][0].r2 >= reports["dummy"][0].r2

    def test_linear_wins_on_linear_target(self, runner):
        data = make_dataset(n_sequences=8, seed=6, target=lambda X: 1 + 2 * X[:, 0] + 3 * X[:, 1])
        reports = runner.compare_models(data).reports
        assert reports["linear"][0].r2 == pytest.approx(1.0, abs=1e-9)
        assert reports["linear"][0].r2 >= reports["forest"][0].r2
        assert reports["linear"][0].r2 >= reports["tree"][0].r2

    def test_forest_beats_linear_on_threshold_target(self, runner):
        data = make_dataset(
            n_sequences=8, seed=7,
            target=lambda X: 1 + 3.0 * ((X[:, 0] > 0.5) & (X[:, 1] > 0.5)),
        )
        reports = runner.compare_models(data).reports
        assert reports["forest"][0].r2 > reports["linear"][0].r2

    def test_unsplittable_dataset(self, runner):
        comparison = runner.compare_models(make_dataset(n_sequences=1))
        assert comparison.failure_counts() == {kind: 1 for kind in MODEL_KINDS}

    def test_single_example_training_side(self, runner):
        data = make_dataset(n_sequences=3, per_sequence=1)
        comparison = runner.compare_models(data, train_fraction=0.3)
        assert comparison.failure_counts() == {kind: 1 for kind in MODEL_KINDS}
        hashes = {reports[0].partition_hash for reports in comparison.reports.values()}
        assert len(hashes) == 1 and "" not in hashes


class TestPoolingComparison:
    def test_twelve_reports_on_one_partition(self, runner):
        datasets = pooled_datasets()
        comparison = runner.compare_poolings(datasets)
        assert len(comparison.reports) == 12
        hashes = {r[0].partition_hash for r in comparison.reports.values()}
        assert len(hashes) == 1
        assert datasets[PoolKind.CONCAT_ALL.value].width == 11
        assert comparison.reports["concat_all"][0].n > 0

    def test_mean_pooling_best_for_mean_target(self, runner):
        comparison = runner.compare_poolings(pooled_datasets(seed=1))
        mean_r2 = comparison.reports["mean"][0].r2
        for kind, reports in comparison.reports.items():
            if kind != "concat_all":
                assert mean_r2 >= (reports[0].r2 if reports[0].r2 is not None else -np.inf)
