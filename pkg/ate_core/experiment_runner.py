"""
Experiment runner for ATE prediction.

This module runs the training/evaluation experiments on assembled datasets:
the standard train-and-evaluate path, baseline model comparison, the
training-fraction sweep and the pooling-function comparison.
"""

import logging
from dataclasses import dataclass
from typing import Mapping, Optional, Sequence

from .errors import AtePredictionError
from .eval.evaluate import evaluate
from .eval.report import (
    EvalReport,
    ModelComparison,
    PoolingComparison,
    SweepReport,
    SweepRow,
    partition_hash,
)
from .features.correlation import DEFAULT_PMCC_THRESHOLD, apply_mask, decorrelate
from .features.split import sequential_split
from .features.types import Dataset
from .regress.fitting import fit_forest, fit_model
from .regress.hyperparameters import Hyperparameters
from .regress.persistence import ModelBundle
from .regress.tuning import DEFAULT_K_FOLDS, DEFAULT_N_CANDIDATES, CvReport, tune

logger = logging.getLogger(__name__)

SWEEP_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
MODEL_KINDS = ("dummy", "linear", "tree", "forest")


@dataclass
class TrainingResult:
    """Outcome of one train-and-evaluate run."""
    bundle: ModelBundle
    report: EvalReport
    cv_report: Optional[CvReport]


class ExperimentRunner:
    """
    Runner for ATE prediction experiments.

    Supports:
    - Training a tuned forest behind a training-side feature mask
    - Train-and-evaluate on a sequential split
    - Baseline model comparison on one partition
    - Training-fraction sweeps over several seeds
    - Pooling-function comparison
    """

    def __init__(
        self,
        pmcc_threshold: float = DEFAULT_PMCC_THRESHOLD,
        n_candidates: int = DEFAULT_N_CANDIDATES,
        k_folds: int = DEFAULT_K_FOLDS,
        n_jobs: int = 1,
    ):
        """
        Initialize the runner.

        Args:
            pmcc_threshold: |PMCC| threshold for collinearity pruning
            n_candidates: Randomized-search budget per training run
            k_folds: Cross-validation folds
            n_jobs: joblib workers for tuning and tree growth
        """
        self.pmcc_threshold = pmcc_threshold
        self.n_candidates = n_candidates
        self.k_folds = k_folds
        self.n_jobs = n_jobs

    def train(
        self,
        train: Dataset,
        rng_seed: int = 0,
        metadata: Optional[dict] = None,
        hyperparameters: Optional[Hyperparameters] = None,
    ) -> tuple[ModelBundle, Optional[CvReport]]:
        """
        Fit a forest: decorrelate on the training side, tune, then fit.

        Args:
            train: Training dataset in the raw descriptor layout
            rng_seed: Master seed for tuning and tree growth
            metadata: Extra metadata stored in the bundle
            hyperparameters: Skip tuning and use these

        Returns:
            (bundle, CV report or None when tuning was skipped)
        """
        mask = decorrelate(train, self.pmcc_threshold)
        masked = apply_mask(train, mask)
        cv_report = None
        if hyperparameters is None:
            hyperparameters, cv_report = tune(
                masked, self.n_candidates, self.k_folds, rng_seed, n_jobs=self.n_jobs
            )
        forest = fit_forest(masked, hyperparameters, rng_seed, self.n_jobs)
        info = {
            "testcase_id": train.testcase_id,
            "rng_seed": rng_seed,
            "n_train": len(train),
            "hyperparameters": hyperparameters.model_dump(),
        }
        info.update(metadata or {})
        return ModelBundle(forest, mask, info), cv_report

    def train_and_evaluate(
        self,
        dataset: Dataset,
        train_fraction: float = 0.7,
        rng_seed: int = 0,
        pooling_kind: str = "",
        hyperparameters: Optional[Hyperparameters] = None,
    ) -> TrainingResult:
        """Split sequentially, train on the first part, evaluate on the rest."""
        train, test = sequential_split(dataset, train_fraction)
        metadata = {
            "testcase_id": dataset.testcase_id,
            "pooling_kind": pooling_kind,
            "train_fraction": train_fraction,
        }
        bundle, cv_report = self.train(train, rng_seed, metadata, hyperparameters)
        report = evaluate(
            bundle, test,
            model_kind="forest",
            partition_hash=partition_hash(train.fingerprint(), test.fingerprint()),
            **metadata,
        )
        return TrainingResult(bundle, report, cv_report)

    def compare_models(
        self,
        dataset: Dataset,
        train_fraction: float = 0.7,
        rng_seed: int = 0,
        kinds: Sequence[str] = MODEL_KINDS,
        pooling_kind: str = "",
    ) -> ModelComparison:
        """
        Evaluate each model family on one identical partition.

        Every family trains behind the same training-side mask; only the
        forest is tuned. Failures are recorded per family.
        """
        metadata = {
            "testcase_id": dataset.testcase_id,
            "pooling_kind": pooling_kind,
            "train_fraction": train_fraction,
        }
        phash = ""
        try:
            train, test = sequential_split(dataset, train_fraction)
            phash = partition_hash(train.fingerprint(), test.fingerprint())
            mask = decorrelate(train, self.pmcc_threshold)
            masked = apply_mask(train, mask)
        except AtePredictionError as exc:
            logger.warning("%s comparison failed: %s", dataset.testcase_id, exc)
            return ModelComparison({
                kind: [EvalReport.failure(str(exc), model_kind=kind, partition_hash=phash,
                                          **metadata)]
                for kind in kinds
            })

        reports: dict[str, list[EvalReport]] = {}
        for kind in kinds:
            try:
                if kind == "forest":
                    hp, _ = tune(masked, self.n_candidates, self.k_folds, rng_seed,
                                 n_jobs=self.n_jobs)
                    model = fit_forest(masked, hp, rng_seed, self.n_jobs)
                else:
                    model = fit_model(kind, masked, rng_seed=rng_seed)
                report = evaluate(ModelBundle(model, mask), test, model_kind=kind,
                                  partition_hash=phash, **metadata)
            except AtePredictionError as exc:
                logger.warning("%s %s failed: %s", dataset.testcase_id, kind, exc)
                report = EvalReport.failure(str(exc), model_kind=kind,
                                            partition_hash=phash, **metadata)
            reports[kind] = [report]
        return ModelComparison(reports)

    def sweep_train_fraction(
        self,
        dataset: Dataset,
        fractions: Sequence[float] = SWEEP_FRACTIONS,
        seeds: Sequence[int] = (0,),
        pooling_kind: str = "",
    ) -> SweepReport:
        """
        Train-and-evaluate at every fraction and seed with the same tuning budget.

        Unsplittable fractions yield failed rows instead of aborting the sweep.
        """
        rows = []
        for fraction in sorted(fractions):
            reports = []
            for seed in seeds:
                try:
                    reports.append(
                        self.train_and_evaluate(dataset, fraction, seed, pooling_kind).report
                    )
                except AtePredictionError as exc:
                    logger.warning("Sweep fraction %.2f seed %d failed: %s", fraction, seed, exc)
                    reports.append(EvalReport.failure(
                        str(exc),
                        testcase_id=dataset.testcase_id,
                        pooling_kind=pooling_kind,
                        train_fraction=fraction,
                        model_kind="forest",
                    ))
            rows.append(SweepRow(fraction, reports))
        return SweepReport(rows, dataset.testcase_id, pooling_kind)

    def compare_poolings(
        self,
        datasets: Mapping[str, Dataset],
        train_fraction: float = 0.7,
        rng_seed: int = 0,
    ) -> PoolingComparison:
        """
        Train-and-evaluate one dataset per pooling kind.

        The datasets share their labels, so every kind sees the same partition
        (checked through the partition hash of the reports).
        """
        reports: dict[str, list[EvalReport]] = {}
        for kind, dataset in datasets.items():
            try:
                report = self.train_and_evaluate(dataset, train_fraction, rng_seed, kind).report
            except AtePredictionError as exc:
                logger.warning("%s pooling %s failed: %s", dataset.testcase_id, kind, exc)
                report = EvalReport.failure(
                    str(exc),
                    testcase_id=dataset.testcase_id,
                    pooling_kind=kind,
                    train_fraction=train_fraction,
                    model_kind="forest",
                )
            reports[kind] = [report]
        hashes = {r[0].partition_hash for r in reports.values() if r[0].partition_hash}
        if len(hashes) > 1:
            logger.warning("Pooling datasets were split into %d different partitions",
                           len(hashes))
        return PoolingComparison(reports)
