"""Detection metrics over labeled scores: AUROC, AUPR, FPR at fixed TPR.

OOD is the positive class throughout, with higher scores meaning "more
OOD". Thresholding is "predict positive when score >= threshold", and
the candidate threshold set is the unique score values (descending).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata

from .exceptions import ConfigurationError, DataError, MetricUndefinedError

ID_LABEL = 0
OOD_LABEL = 1


@dataclass(frozen=True)
class LabeledScores:
    """Scores paired with binary labels (1 = OOD, the positive class)."""

    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        scores = np.asarray(self.scores, dtype=np.float64)
        labels = np.asarray(self.labels)
        if scores.ndim != 1 or labels.shape != scores.shape:
            raise ConfigurationError("scores and labels must be 1-D arrays of equal length")
        if not np.isfinite(scores).all():
            raise DataError("scores contain non-finite values")
        if not np.isin(labels, (ID_LABEL, OOD_LABEL)).all():
            raise DataError("labels must be 0 (ID) or 1 (OOD)")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels.astype(np.int64))

    @property
    def n_ood(self) -> int:
        return int(self.labels.sum())

    @property
    def n_id(self) -> int:
        return int(self.labels.size - self.labels.sum())


@dataclass(frozen=True)
class MetricsReport:
    fpr95: float
    auroc: float
    aupr: float
    n_id: int
    n_ood: int
    threshold_at_tpr95: float
    nonconverged_batches: tuple[int, ...] = ()


def _require_both_classes(ls: LabeledScores) -> None:
    if ls.n_ood == 0 or ls.n_id == 0:
        raise MetricUndefinedError(
            f"metrics need both classes, got {ls.n_id} ID and {ls.n_ood} OOD labels"
        )


def auroc(ls: LabeledScores) -> float:
    """Probability a random OOD score exceeds a random ID score, ties as 1/2."""
    _require_both_classes(ls)
    ranks = rankdata(ls.scores)  # average rank on ties == the 1/2 convention
    pos_rank_sum = float(ranks[ls.labels == OOD_LABEL].sum())
    n1, n0 = ls.n_ood, ls.n_id
    return (pos_rank_sum - n1 * (n1 + 1) / 2.0) / (n1 * n0)


def _threshold_sweep(scores: np.ndarray, labels: np.ndarray):
    """Cumulative TP/FP at each unique threshold, descending."""
    order = np.argsort(-scores, kind="stable")
    sorted_scores = scores[order]
    sorted_labels = labels[order]
    tp = np.cumsum(sorted_labels == OOD_LABEL)
    fp = np.cumsum(sorted_labels == ID_LABEL)
    # keep the last index of every tied block: that is the count when the
    # threshold equals this score value
    last = np.nonzero(np.r_[sorted_scores[1:] != sorted_scores[:-1], True])[0]
    return sorted_scores[last], tp[last], fp[last]


def aupr(ls: LabeledScores) -> float:
    """Area under precision-recall by step-wise summation (no interpolation)."""
    _require_both_classes(ls)
    _, tp, fp = _threshold_sweep(ls.scores, ls.labels)
    recall = tp / ls.n_ood
    precision = tp / (tp + fp)
    prev_recall = np.r_[0.0, recall[:-1]]
    return float(((recall - prev_recall) * precision).sum())


def fpr_at_tpr(ls: LabeledScores, tpr_target: float = 0.95, tpr_on: str = "ood"):
    """Smallest FPR among thresholds reaching the target TPR; returns (fpr, threshold).

    With ``tpr_on="ood"`` (default) the TPR is the OOD recall and the FPR
    the fraction of ID inputs flagged. ``tpr_on="id"`` instead fixes the
    recall of ID inputs (treating "score <= threshold" as an ID
    prediction) and reports the fraction of OOD inputs passing as ID;
    both conventions appear in the literature.
    """
    _require_both_classes(ls)
    if not 0.0 < tpr_target <= 1.0:
        raise ConfigurationError(f"tpr_target must lie in (0, 1], got {tpr_target!r}")
    if tpr_on not in ("ood", "id"):
        raise ConfigurationError(f"tpr_on must be 'ood' or 'id', got {tpr_on!r}")

    if tpr_on == "id":
        flipped = LabeledScores(-ls.scores, 1 - ls.labels)
        fpr, threshold = fpr_at_tpr(flipped, tpr_target, "ood")
        return fpr, -threshold

    thresholds, tp, fp = _threshold_sweep(ls.scores, ls.labels)
    tpr = tp / ls.n_ood
    fpr = fp / ls.n_id
    # tpr and fpr both grow as the threshold drops, so the first feasible
    # threshold carries the smallest feasible fpr
    k = int(np.argmax(tpr >= tpr_target))
    return float(fpr[k]), float(thresholds[k])


def compute_metrics(
    ls: LabeledScores,
    tpr_target: float = 0.95,
    tpr_on: str = "ood",
    nonconverged_batches: tuple[int, ...] = (),
) -> MetricsReport:
    """All three metrics in one report."""
    fpr, threshold = fpr_at_tpr(ls, tpr_target, tpr_on)
    return MetricsReport(
        fpr95=fpr,
        auroc=auroc(ls),
        aupr=aupr(ls),
        n_id=ls.n_id,
        n_ood=ls.n_ood,
        threshold_at_tpr95=threshold,
        nonconverged_batches=nonconverged_batches,
    )
