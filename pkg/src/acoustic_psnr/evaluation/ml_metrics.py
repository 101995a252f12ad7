"""
Classical detection metrics from the confusion matrix
Loss, weighted (balanced) accuracy, precision, recall and F1
"""

import math
from dataclasses import asdict, dataclass
from typing import Dict, Optional, Sequence

import numpy as np
from sklearn.metrics import (
    balanced_accuracy_score,
    confusion_matrix,
    log_loss,
    precision_recall_fscore_support,
)

from ..exceptions import UsageError

# Decisions are strictly greater than this probability
DECISION_THRESHOLD = 0.5


@dataclass(frozen=True)
class ConfusionCounts:
    """Confusion matrix counts, positive class = contains the call"""

    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    @property
    def positives(self) -> int:
        return self.tp + self.fn

    @property
    def negatives(self) -> int:
        return self.tn + self.fp


@dataclass(frozen=True)
class MetricsSummary:
    """Metric values; None where the metric is undefined (empty class)"""

    loss: Optional[float]
    weighted_accuracy: Optional[float]
    precision: Optional[float]
    recall: Optional[float]
    f1: Optional[float]
    geometric_f: Optional[float]

    def to_dict(self) -> Dict[str, Optional[float]]:
        return asdict(self)


def _defined(value: float) -> Optional[float]:
    return None if value is None or math.isnan(value) else float(value)


def _as_bool(values: Sequence) -> np.ndarray:
    return np.asarray(values, dtype=bool).ravel()


def confusion(decisions: Sequence[bool], labels: Sequence[bool]) -> ConfusionCounts:
    """Count decisions against labels"""
    decisions, labels = _as_bool(decisions), _as_bool(labels)
    if decisions.shape != labels.shape:
        raise UsageError(f"{decisions.size} decisions vs {labels.size} labels")
    if labels.size == 0:
        return ConfusionCounts(tp=0, fp=0, tn=0, fn=0)
    tn, fp, fn, tp = confusion_matrix(labels, decisions, labels=[False, True]).ravel()
    return ConfusionCounts(tp=int(tp), fp=int(fp), tn=int(tn), fn=int(fn))


def binary_cross_entropy(scores: Sequence[float], labels: Sequence[bool]) -> Optional[float]:
    scores = np.asarray(scores, dtype=np.float64).ravel()
    if scores.size == 0:
        return None
    return float(log_loss(_as_bool(labels).astype(int), scores, labels=[0, 1]))


def summary(
    counts: ConfusionCounts,
    scores: Sequence[float],
    labels: Sequence[bool],
    threshold: float = DECISION_THRESHOLD,
) -> MetricsSummary:
    """
    Metric summary for one (configuration, split)

    weighted_accuracy is the balanced accuracy (mean of the per-class recalls)
    and needs both classes; f1 is the harmonic mean of precision and recall,
    geometric_f their geometric mean.
    """
    scores = np.asarray(scores, dtype=np.float64).ravel()
    labels = _as_bool(labels)
    decisions = scores > threshold
    if scores.shape != labels.shape or confusion(decisions, labels) != counts:
        raise UsageError("Confusion counts are inconsistent with scores/labels")
    if labels.size == 0:
        return MetricsSummary(None, None, None, None, None, None)

    precision, recall, f1, _ = precision_recall_fscore_support(
        labels, decisions, labels=[True], average=None, zero_division=np.nan
    )
    precision, recall = _defined(precision[0]), _defined(recall[0])

    weighted_accuracy = None
    if counts.positives > 0 and counts.negatives > 0:
        weighted_accuracy = float(balanced_accuracy_score(labels, decisions))

    f1_value = None
    geometric_f = None
    if precision is not None and recall is not None:
        f1_value = 0.0 if precision + recall == 0 else _defined(f1[0])
        geometric_f = float(np.sqrt(precision * recall))

    return MetricsSummary(
        loss=binary_cross_entropy(scores, labels),
        weighted_accuracy=weighted_accuracy,
        precision=precision,
        recall=recall,
        f1=f1_value,
        geometric_f=geometric_f,
    )


def evaluate_scores(scores: Sequence[float], labels: Sequence[bool]) -> MetricsSummary:
    """confusion() + summary() with the > 0.5 decision rule"""
    scores = np.asarray(scores, dtype=np.float64)
    counts = confusion(scores > DECISION_THRESHOLD, labels)
    return summary(counts, scores, labels)
