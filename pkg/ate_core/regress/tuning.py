"""
Randomized hyperparameter search with sequence-respecting cross validation.

Candidates are drawn from the hyperparameter search space: n_estimators
log-uniformly, max_depth uniformly, the categorical fields uniformly from
their choices. Each candidate is scored by its mean fold R^2. The best
candidate wins; ties go to fewer estimators, then a shallower max_depth,
then the earlier candidate.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed
from scipy.stats import loguniform, randint

from ..errors import SplitError
from ..features.split import sequence_folds
from ..features.types import Dataset
from ..rng import derive_rng
from .forest import RandomForestRegressor
from .hyperparameters import (
    MAX_DEPTH_RANGE,
    MAX_FEATURES_CHOICES,
    MIN_SAMPLES_LEAF_CHOICES,
    MIN_SAMPLES_SPLIT_CHOICES,
    N_ESTIMATORS_RANGE,
    Hyperparameters,
)

logger = logging.getLogger(__name__)

DEFAULT_N_CANDIDATES = 60
DEFAULT_K_FOLDS = 3
SCORE_TIE_TOLERANCE = 1e-12


def sample_candidates(n_candidates: int, rng_seed: int = 0) -> list[Hyperparameters]:
    """Draw n_candidates hyperparameter points from the search space."""
    if n_candidates < 1:
        raise ValueError(f"n_candidates must be positive, got {n_candidates}")
    rng = derive_rng(rng_seed, "tune-candidates")
    estimators = loguniform(*N_ESTIMATORS_RANGE)
    depth = randint(MAX_DEPTH_RANGE[0], MAX_DEPTH_RANGE[1] + 1)
    candidates = []
    for _ in range(n_candidates):
        n_estimators = int(np.clip(round(float(estimators.rvs(random_state=rng))),
                                   *N_ESTIMATORS_RANGE))
        candidates.append(Hyperparameters(
            n_estimators=n_estimators,
            min_samples_split=int(rng.choice(MIN_SAMPLES_SPLIT_CHOICES)),
            min_samples_leaf=int(rng.choice(MIN_SAMPLES_LEAF_CHOICES)),
            max_features=str(rng.choice(MAX_FEATURES_CHOICES)),
            max_depth=int(depth.rvs(random_state=rng)),
            bootstrap=bool(rng.integers(0, 2)),
        ))
    return candidates


def fold_r2(y: np.ndarray, yhat: np.ndarray) -> Optional[float]:
    """R^2 of one fold; None when the fold targets are constant."""
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return None
    return 1.0 - float(np.sum((y - yhat) ** 2)) / ss_tot


@dataclass
class CvReport:
    """
    Per-candidate cross-validation results.

    Attributes:
        candidates: Evaluated hyperparameter points, in draw order
        fold_scores: (n_candidates, k_folds) R^2 values, NaN where undefined
        best_index: Index of the winning candidate
        fold_sizes: Number of examples held out by each fold
        sequence_folds: Whether folds are whole sequences (False after fallback)
    """
    candidates: list[Hyperparameters]
    fold_scores: np.ndarray
    best_index: int
    fold_sizes: list[int] = field(default_factory=list)
    sequence_folds: bool = True

    @property
    def mean_scores(self) -> np.ndarray:
        """Mean over defined folds; -inf for a candidate with no defined fold."""
        scores = np.full(len(self.candidates), -np.inf)
        for i, row in enumerate(self.fold_scores):
            defined = row[np.isfinite(row)]
            if defined.size:
                scores[i] = float(defined.mean())
        return scores

    @property
    def best(self) -> Hyperparameters:
        return self.candidates[self.best_index]

    def to_dict(self) -> dict:
        means = self.mean_scores
        return {
            "best_index": self.best_index,
            "best": self.best.model_dump(),
            "fold_sizes": list(self.fold_sizes),
            "sequence_folds": self.sequence_folds,
            "candidates": [
                {
                    "hyperparameters": c.model_dump(),
                    "fold_r2": [None if not math.isfinite(s) else float(s) for s in row],
                    "mean_r2": None if not math.isfinite(m) else float(m),
                }
                for c, row, m in zip(self.candidates, self.fold_scores, means)
            ],
        }


def select_best(candidates: Sequence[Hyperparameters], scores: np.ndarray) -> int:
    """Index of the best score with the documented tie-breaking order."""
    top = float(np.max(scores))
    if math.isinf(top):
        tied = list(range(len(candidates)))
    else:
        tied = [i for i, s in enumerate(scores) if s >= top - SCORE_TIE_TOLERANCE]
    return min(tied, key=lambda i: (candidates[i].n_estimators, candidates[i].max_depth, i))


def _score_fold(
    X: np.ndarray, y: np.ndarray, test: np.ndarray, hp: Hyperparameters, rng_seed: int
) -> float:
    train = np.setdiff1d(np.arange(y.shape[0]), test, assume_unique=True)
    model = RandomForestRegressor(hp, rng_seed).fit(X[train], y[train])
    score = fold_r2(y[test], model.predict(X[test]))
    return np.nan if score is None else score


def tune(
    train: Dataset,
    n_candidates: int = DEFAULT_N_CANDIDATES,
    k_folds: int = DEFAULT_K_FOLDS,
    rng_seed: int = 0,
    candidates: Optional[Sequence[Hyperparameters]] = None,
    n_jobs: int = 1,
) -> tuple[Hyperparameters, CvReport]:
    """
    Pick forest hyperparameters by randomized search.

    Args:
        train: Training dataset (already masked)
        n_candidates: Number of random candidates (ignored with explicit candidates)
        k_folds: Number of contiguous CV folds
        rng_seed: Seed for candidate draws and forest fitting
        candidates: Explicit candidates to evaluate instead of random draws
        n_jobs: joblib workers over (candidate, fold) pairs

    Returns:
        (best hyperparameters, CvReport)
    """
    if len(train) < k_folds:
        raise SplitError(f"{len(train)} examples are too few for {k_folds} folds")
    folds = sequence_folds(train, k_folds)
    candidates = list(candidates) if candidates is not None else sample_candidates(
        n_candidates, rng_seed
    )
    if not candidates:
        raise ValueError("No hyperparameter candidates to evaluate")

    X, y = np.asarray(train.X), train.y
    flat = Parallel(n_jobs=n_jobs)(
        delayed(_score_fold)(X, y, fold, hp, rng_seed)
        for hp in candidates
        for fold in folds
    )
    fold_scores = np.asarray(flat, dtype=np.float64).reshape(len(candidates), len(folds))
    report = CvReport(
        candidates=candidates,
        fold_scores=fold_scores,
        best_index=0,
        fold_sizes=[int(f.shape[0]) for f in folds],
        sequence_folds=len(train.sequences()) >= k_folds,
    )
    report.best_index = select_best(candidates, report.mean_scores)
    for i, (hp, score) in enumerate(zip(candidates, report.mean_scores)):
        logger.debug("candidate %d: mean R2 %.4f %s", i, score, hp.model_dump())
    logger.info(
        "Tuning picked candidate %d of %d (mean CV R2 %.4f)",
        report.best_index, len(candidates), report.mean_scores[report.best_index],
    )
    return report.best, report
