"""
ATE-at-fraction baseline: predict a sequence's final ATE by the ATE of its
early prefix.
"""

import math
from typing import Sequence

from ..errors import InsufficientDataError
from ..trajectory.types import SubTrajectoryExample
from .evaluate import report_from_predictions
from .report import EvalReport


def fraction_cutoff(n_keyframes: int, fraction: float) -> int:
    """Keyframe cutoff ceil(fraction * K), at least 1."""
    return max(1, math.ceil(fraction * n_keyframes - 1e-9))


def ate_at_fraction_baseline(
    sequences: Sequence[Sequence[SubTrajectoryExample]],
    fraction: float = 0.2,
    testcase_id: str = "",
) -> EvalReport:
    """
    Evaluate the early-prefix ATE as a predictor of the full-trajectory ATE.

    For each sequence of K keyframes the prediction is the ATE of the first
    usable prefix with cutoff >= ceil(fraction * K) and the target is the
    ATE of the whole trajectory (cutoff K).

    Args:
        sequences: Labels of each sequence (skipped ones included)
        fraction: Prefix fraction in (0, 1]
        testcase_id: Label for the report

    Returns:
        EvalReport over all sequences (model_kind "ate_at_fraction")
    """
    if not 0 < fraction <= 1:
        raise ValueError(f"fraction must be in (0, 1], got {fraction}")
    y, yhat, ids, ks = [], [], [], []
    for labels in sequences:
        labels = sorted(labels, key=lambda e: e.cutoff_k)
        if not labels:
            raise InsufficientDataError("Sequence without labels")
        final = labels[-1]
        if final.skipped:
            raise InsufficientDataError(
                f"{final.sequence_id}: full trajectory ATE is unavailable ({final.skip_reason})"
            )
        cutoff = fraction_cutoff(final.cutoff_k, fraction)
        early = next((e for e in labels if e.cutoff_k >= cutoff and not e.skipped), None)
        y.append(final.ate)
        yhat.append(early.ate)
        ids.append(final.sequence_id)
        ks.append(final.cutoff_k)
    return report_from_predictions(
        y, yhat, ids, ks,
        testcase_id=testcase_id,
        model_kind="ate_at_fraction",
        train_fraction=fraction,
    )
