"""
Pipeline stages behind the CLI subcommands.

Output layout under the output root:

    examples/<testcase>/<sequence>.csv    sub-trajectory labels
    examples/<testcase>/summary.json      per-sequence keyframe/example counts
    matrices/<testcase>/<sequence>.csv    characterization matrices
    descriptors/<testcase>/<pool>.csv     full-sequence descriptors
    datasets/<testcase>/<pool>.csv        pooled training datasets
    models/<testcase>/<pool>.json         trained model bundles (+ mask JSON)
    reports/...                           JSON and text reports, prediction dumps
    cache/matrices/<digest>.csv           content-addressed matrix cache
    manifest.json, timings.json
"""

import logging
import time
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, Optional

import numpy as np
import pandas as pd

from ate_core.atomic import atomic_write_text, write_csv, write_json
from ate_core.characterization.io import load_sequence
from ate_core.characterization.sequence import characterize_sequence, resolve_metrics
from ate_core.characterization.types import CharacterizationMatrix
from ate_core.errors import AtePredictionError, WidthMismatchError
from ate_core.eval.baselines import ate_at_fraction_baseline
from ate_core.eval.report import (
    BaselineRow,
    BaselineTable,
    EvalReport,
    ModelComparison,
    PoolingComparison,
    SweepReport,
    render_table,
)
from ate_core.experiment_runner import ExperimentRunner
from ate_core.features.assemble import build_dataset
from ate_core.features.io import META_COLUMNS, dataset_to_frame
from ate_core.features.split import sequential_split
from ate_core.features.types import Dataset
from ate_core.pooling.io import SOURCE_COLUMN, iter_descriptor_chunks
from ate_core.pooling.pool import pool, pool_kinds
from ate_core.pooling.types import PoolingFunction, PoolKind
from ate_core.regress.persistence import ModelBundle, load_model
from ate_core.synth.generator import SynthSettings, generate_corpus
from ate_core.trajectory.examples import generate_subtrajectory_examples
from ate_core.trajectory.io import load_trajectory
from ate_core.trajectory.types import FrameId, SubTrajectoryExample

from .config import PipelineConfig, TestcaseConfig, output_root
from .manifest import RunManifest, config_hash
from .storage import MatrixCache

logger = logging.getLogger(__name__)

LABEL_COLUMNS = ("sequence_id", "cutoff_k", "ate", "skipped", "skip_reason", "timestamp")


def labels_frame(labels: list[SubTrajectoryExample]) -> pd.DataFrame:
    return pd.DataFrame([e.to_dict() for e in labels], columns=list(LABEL_COLUMNS))


class Pipeline:
    """
    Stage runner for one validated config.

    Per-testcase failures are logged and collected in `errors`; the stage
    moves on to the next testcase.
    """

    def __init__(self, config: PipelineConfig):
        self.config = config
        self.root = output_root(config)
        self.manifest = RunManifest(config_hash(config.hash_payload()), self.root)
        self.runner = ExperimentRunner(
            pmcc_threshold=config.pmcc_threshold,
            n_candidates=config.tuning.n_candidates,
            k_folds=config.tuning.k_folds,
            n_jobs=config.n_jobs,
        )
        self.cache = MatrixCache(self.root / "cache" / "matrices")
        self.errors: list[str] = []
        self._labels: dict[str, dict[str, list[SubTrajectoryExample]]] = {}
        self._matrices: dict[str, dict[str, CharacterizationMatrix]] = {}

    # ------------------------------------------------------------------
    # plumbing

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        logger.info("Stage %s started", name)
        start = time.perf_counter()
        try:
            yield
        finally:
            elapsed = time.perf_counter() - start
            self.manifest.add_timing(name, elapsed)
            logger.info("Stage %s finished in %.2fs", name, elapsed)

    def fail(self, testcase_id: str, stage: str, exc: Exception) -> None:
        message = f"{stage} {testcase_id}: {exc}"
        logger.error(message)
        self.errors.append(message)

    def output(self, stage: str, path: Path) -> Path:
        self.manifest.record_output(stage, path)
        return path

    def pooling(self, kind: Optional[str] = None) -> PoolingFunction:
        return PoolingFunction(PoolKind.parse(kind or self.config.pooling_kind),
                               self.config.histogram_bins)

    def finish(self) -> int:
        """Write the manifest; return the process exit code."""
        self.manifest.save()
        return 1 if self.errors else 0

    # ------------------------------------------------------------------
    # building blocks

    def labels(self, testcase: TestcaseConfig) -> dict[str, list[SubTrajectoryExample]]:
        """Sub-trajectory labels of every sequence (computed once per run)."""
        if testcase.id in self._labels:
            return self._labels[testcase.id]
        result = {}
        for sequence in testcase.sequences:
            estimate = load_trajectory(sequence.estimate_trajectory_path,
                                       frame_id=FrameId.ESTIMATE)
            truth = load_trajectory(sequence.ground_truth_path, frame_id=FrameId.GROUND_TRUTH)
            self.manifest.record_input("generate-examples", sequence.estimate_trajectory_path)
            self.manifest.record_input("generate-examples", sequence.ground_truth_path)
            result[sequence.id] = generate_subtrajectory_examples(
                estimate, truth, testcase.alignment, self.config.max_time_offset,
                sequence_id=sequence.id, n_jobs=self.config.n_jobs,
            )
        self._labels[testcase.id] = result
        return result

    def matrices(self, testcase: TestcaseConfig) -> dict[str, CharacterizationMatrix]:
        """Characterization matrices of every sequence, through the digest cache."""
        if testcase.id in self._matrices:
            return self._matrices[testcase.id]
        metric_names = [m.name for m in resolve_metrics(self.config.metrics)]
        result = {}
        for sequence in testcase.sequences:
            self.manifest.record_input("characterize", sequence.frames_index_path)
            if sequence.imu_path is not None:
                self.manifest.record_input("characterize", sequence.imu_path)
            key = MatrixCache.key(sequence.frames_index_path, sequence.imu_path, metric_names)
            matrix = self.cache.get(key, sequence.id)
            if matrix is None:
                frames = load_sequence(sequence.frames_index_path, sequence.imu_path)
                matrix = characterize_sequence(frames, metric_names, sequence.id,
                                               self.config.n_jobs)
                self.cache.put(key, matrix)
            result[sequence.id] = matrix
        self._matrices[testcase.id] = result
        return result

    def dataset(self, testcase: TestcaseConfig, kind: Optional[str] = None) -> Dataset:
        labels = self.labels(testcase)
        matrices = self.matrices(testcase)
        f = self.pooling(kind)
        dataset = build_dataset(
            [(labels[s.id], matrices[s.id]) for s in testcase.sequences],
            f, testcase.id, self.config.max_time_offset, n_jobs=self.config.n_jobs,
        )
        path = self.root / "datasets" / testcase.id / f"{f.kind.value}.csv"
        self.output("datasets", write_csv(path, dataset_to_frame(dataset)))
        return dataset

    # ------------------------------------------------------------------
    # stages

    def generate_examples(self) -> None:
        with self.stage("generate-examples"):
            for testcase in self.config.testcases:
                try:
                    labels = self.labels(testcase)
                except (AtePredictionError, OSError) as exc:
                    self.fail(testcase.id, "generate-examples", exc)
                    continue
                rows = []
                for sequence_id, seq_labels in labels.items():
                    path = self.root / "examples" / testcase.id / f"{sequence_id}.csv"
                    self.output("generate-examples", write_csv(path, labels_frame(seq_labels)))
                    skipped = sum(e.skipped for e in seq_labels)
                    rows.append({
                        "sequence_id": sequence_id,
                        "keyframes": len(seq_labels),
                        "examples": len(seq_labels) - skipped,
                        "skipped": skipped,
                    })
                summary = {
                    "testcase_id": testcase.id,
                    "alignment_mode": testcase.alignment.value,
                    "sequences": rows,
                    "total_examples": sum(r["examples"] for r in rows),
                    "total_skipped": sum(r["skipped"] for r in rows),
                }
                path = self.root / "examples" / testcase.id / "summary.json"
                self.output("generate-examples", write_json(path, summary))
                logger.info("%s: %d examples (%d skipped prefixes)", testcase.id,
                            summary["total_examples"], summary["total_skipped"])

    def characterize(self) -> None:
        f = self.pooling()
        with self.stage("characterize"):
            for testcase in self.config.testcases:
                try:
                    matrices = self.matrices(testcase)
                except (AtePredictionError, OSError) as exc:
                    self.fail(testcase.id, "characterize", exc)
                    continue
                directory = self.root / "matrices" / testcase.id
                descriptors = []
                for sequence_id, matrix in matrices.items():
                    table = pd.DataFrame(matrix.values.T, columns=list(matrix.metric_names))
                    table.insert(0, "timestamp", matrix.timestamps)
                    self.output("characterize",
                                write_csv(directory / f"{sequence_id}.csv", table))
                    descriptors.append(pool(matrix, f, source_id=sequence_id))
                table = pd.DataFrame(np.vstack([d.values for d in descriptors]),
                                     columns=list(descriptors[0].feature_names))
                table.insert(0, SOURCE_COLUMN, [d.source_id for d in descriptors])
                path = self.root / "descriptors" / testcase.id / f"{f.kind.value}.csv"
                self.output("characterize", write_csv(path, table))

    def train(self) -> list[EvalReport]:
        reports = []
        kind = self.pooling().kind.value
        with self.stage("train"):
            for testcase in self.config.testcases:
                try:
                    dataset = self.dataset(testcase)
                    result = self.runner.train_and_evaluate(
                        dataset, self.config.train_fraction, self.config.master_seed, kind
                    )
                except (AtePredictionError, OSError) as exc:
                    self.fail(testcase.id, "train", exc)
                    continue
                self.write_model(testcase.id, kind, result.bundle)
                base = self.root / "reports" / testcase.id / f"train_{kind}"
                self.output("train", write_json(base.with_suffix(".json"), {
                    "report": result.report.to_dict(),
                    "cv": None if result.cv_report is None else result.cv_report.to_dict(),
                    "feature_mask": result.bundle.feature_mask.to_dict(),
                }))
                self.output("train", atomic_write_text(base.with_suffix(".txt"),
                                                       render_table([result.report.row()])))
                predictions = base.with_name(f"predictions_{kind}.csv")
                self.output("train", write_csv(predictions, result.report.predictions_frame()))
                reports.append(result.report)
        return reports

    def write_model(self, testcase_id: str, kind: str, bundle: ModelBundle) -> Path:
        directory = self.root / "models" / testcase_id
        path = self.output("train", write_json(directory / f"{kind}.json", bundle.to_dict(),
                                               indent=None))
        self.output("train", write_json(directory / f"{kind}.mask.json",
                                        bundle.feature_mask.to_dict()))
        return path

    def sweep(self) -> None:
        kind = self.pooling().kind.value
        sweeps, baseline_rows = [], []
        with self.stage("sweep"):
            for testcase in self.config.testcases:
                try:
                    dataset = self.dataset(testcase)
                    report = self.runner.sweep_train_fraction(
                        dataset, self.config.sweep_fractions, self.config.sweep_seeds, kind
                    )
                    baseline_rows.append(self.baseline_row(testcase, dataset, kind, report))
                except (AtePredictionError, OSError) as exc:
                    self.fail(testcase.id, "sweep", exc)
                    continue
                sweeps.append(report)
            reports = self.root / "reports"
            self.output("sweep", write_json(reports / "sweep.json",
                                            [s.to_dict() for s in sweeps]))
            self.output("sweep", atomic_write_text(reports / "sweep.txt", "\n".join(
                f"== {s.testcase_id} ({s.pooling_kind})\n{s.to_text()}" for s in sweeps
            )))
            table = BaselineTable(baseline_rows, fraction=0.2)
            self.output("sweep", write_json(reports / "baseline.json", table.to_dict()))
            self.output("sweep", atomic_write_text(reports / "baseline.txt", table.to_text()))
            logger.info("ATE-at-20%% baseline:\n%s", table.to_text())

    def reference_report(self, sweep: Optional[SweepReport]) -> Optional[EvalReport]:
        """The sweep's report at the configured fraction and master seed, if it ran."""
        if sweep is None or self.config.master_seed not in self.config.sweep_seeds:
            return None
        try:
            row = sweep.row_at(self.config.train_fraction)
        except KeyError:
            return None
        report = row.reports[list(self.config.sweep_seeds).index(self.config.master_seed)]
        return None if report.error is not None else report

    def baseline_row(
        self,
        testcase: TestcaseConfig,
        dataset: Dataset,
        kind: str,
        sweep: Optional[SweepReport] = None,
    ) -> BaselineRow:
        """ATE-at-20% baseline vs the forest, both on the test-side sequences."""
        model = self.reference_report(sweep)
        if model is None:
            model = self.runner.train_and_evaluate(
                dataset, self.config.train_fraction, self.config.master_seed, kind
            ).report
        _, test = sequential_split(dataset, self.config.train_fraction)
        labels = self.labels(testcase)
        baseline = ate_at_fraction_baseline(
            [labels[s] for s in test.sequences()], 0.2, testcase.id
        )
        return BaselineRow(testcase.id, baseline, model)

    def compare_poolings(self) -> PoolingComparison:
        comparison = PoolingComparison({})
        with self.stage("compare-poolings"):
            for testcase in self.config.testcases:
                try:
                    datasets = {k.value: self.dataset(testcase, k.value) for k in pool_kinds()}
                except (AtePredictionError, OSError) as exc:
                    self.fail(testcase.id, "compare-poolings", exc)
                    continue
                comparison.extend(self.runner.compare_poolings(
                    datasets, self.config.train_fraction, self.config.master_seed
                ))
            reports = self.root / "reports"
            self.output("compare-poolings",
                        write_json(reports / "pooling.json", comparison.to_dict()))
            self.output("compare-poolings",
                        atomic_write_text(reports / "pooling.txt", comparison.to_text()))
            logger.info("Pooling comparison:\n%s", comparison.to_text())
        return comparison

    def compare_models(self) -> ModelComparison:
        comparison = ModelComparison({})
        kind = self.pooling().kind.value
        with self.stage("compare-models"):
            for testcase in self.config.testcases:
                try:
                    dataset = self.dataset(testcase)
                except (AtePredictionError, OSError) as exc:
                    self.fail(testcase.id, "compare-models", exc)
                    continue
                comparison.extend(self.runner.compare_models(
                    dataset, self.config.train_fraction, self.config.master_seed,
                    pooling_kind=kind,
                ))
            reports = self.root / "reports"
            self.output("compare-models",
                        write_json(reports / "models.json", comparison.to_dict()))
            self.output("compare-models",
                        atomic_write_text(reports / "models.txt", comparison.to_text()))
            logger.info("Model comparison:\n%s", comparison.to_text())
        return comparison


def cmd_generate_examples(config: PipelineConfig) -> int:
    pipeline = Pipeline(config)
    pipeline.generate_examples()
    return pipeline.finish()


def cmd_characterize(config: PipelineConfig) -> int:
    pipeline = Pipeline(config)
    pipeline.characterize()
    return pipeline.finish()


def cmd_train(config: PipelineConfig) -> int:
    pipeline = Pipeline(config)
    pipeline.generate_examples()
    pipeline.train()
    return pipeline.finish()


def cmd_sweep(config: PipelineConfig) -> int:
    pipeline = Pipeline(config)
    pipeline.generate_examples()
    pipeline.sweep()
    return pipeline.finish()


def cmd_compare_poolings(config: PipelineConfig) -> int:
    pipeline = Pipeline(config)
    pipeline.generate_examples()
    pipeline.compare_poolings()
    return pipeline.finish()


def cmd_compare_models(config: PipelineConfig) -> int:
    pipeline = Pipeline(config)
    pipeline.generate_examples()
    pipeline.compare_models()
    return pipeline.finish()


def cmd_predict(model_path: Path, descriptor_path: Path, out_path: Path,
                chunksize: int = 1024) -> int:
    """
    Predict one ATE per descriptor row, streaming the input in chunks.

    The input may be a descriptor CSV (source_id + features) or a dataset CSV
    (sequence_id, cutoff_k, ate + features). Feature columns are matched by
    name to the raw or the masked model layout once, from the header; a
    header that fits neither raises WidthMismatchError without a row. A row
    with missing or non-numeric values raises it with the 1-based row number.
    """
    bundle = load_model(model_path)
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    tmp = out_path.with_name(f".{out_path.name}.tmp")
    layout: Optional[list[str]] = None
    row_offset = 0
    try:
        with tmp.open("w", encoding="utf-8", newline="") as handle:
            handle.write(f"{SOURCE_COLUMN},predicted_ate\n")
            for chunk in iter_descriptor_chunks(descriptor_path, chunksize):
                if layout is None:
                    layout = bundle.input_columns(
                        [c for c in chunk.columns if c not in META_COLUMNS and c != SOURCE_COLUMN]
                    )
                values = chunk.loc[:, layout].apply(pd.to_numeric, errors="coerce")
                values = values.to_numpy(dtype=np.float64)
                for i, row in enumerate(values):
                    if not np.all(np.isfinite(row)):
                        width = int(np.count_nonzero(np.isfinite(row)))
                        raise WidthMismatchError(
                            f"{width} finite values, expected {len(layout)}",
                            row=row_offset + i + 1,
                        )
                if len(values):
                    out = pd.DataFrame({
                        SOURCE_COLUMN: _row_ids(chunk, row_offset),
                        "predicted_ate": bundle.predict(values),
                    })
                    out.to_csv(handle, header=False, index=False, float_format="%.17g",
                               lineterminator="\n")
                row_offset += len(chunk)
        tmp.replace(out_path)
    finally:
        if tmp.exists():
            tmp.unlink()
    logger.info("Wrote %d predictions to %s", row_offset, out_path)
    return 0


def _row_ids(chunk: pd.DataFrame, offset: int) -> list[str]:
    if SOURCE_COLUMN in chunk.columns:
        return chunk[SOURCE_COLUMN].astype(str).tolist()
    if "sequence_id" in chunk.columns and "cutoff_k" in chunk.columns:
        return [f"{s}@{int(k)}" for s, k in zip(chunk["sequence_id"], chunk["cutoff_k"])]
    return [str(offset + i + 1) for i in range(len(chunk))]


def cmd_synth(out_dir: Path, n_sequences: int = 20, master_seed: int = 0,
              noise: float = 0.05, min_keyframes: int = 40, max_keyframes: int = 60,
              darkening: float = 0.3) -> Path:
    """
    Generate a synthetic corpus and its config.json (testcase "S-SYNTH").

    Returns:
        Path of the written config file
    """
    out_dir = Path(out_dir)
    settings = SynthSettings(
        n_sequences=n_sequences,
        min_keyframes=min_keyframes,
        max_keyframes=max_keyframes,
        noise=noise,
        darkening=darkening,
    )
    sequences = generate_corpus(out_dir, settings, master_seed)
    config = {
        "testcases": [{
            "id": "S-SYNTH",
            "alignment_mode": "SE3",
            "sequences": [
                {
                    "id": s.sequence_id,
                    "estimate_trajectory_path": s.estimate_trajectory_path,
                    "ground_truth_path": s.ground_truth_path,
                    "frames_index_path": s.frames_index_path,
                    "imu_path": s.imu_path,
                }
                for s in sequences
            ],
        }],
        "pooling_kind": "mean",
        "train_fraction": 0.7,
        "master_seed": master_seed,
    }
    return write_json(out_dir / "config.json", config)

