"""
Classical ML metrics over detector decisions
"""

from .ml_metrics import (
    DECISION_THRESHOLD,
    ConfusionCounts,
    MetricsSummary,
    binary_cross_entropy,
    confusion,
    evaluate_scores,
    summary,
)

__all__ = [
    "DECISION_THRESHOLD",
    "ConfusionCounts",
    "MetricsSummary",
    "binary_cross_entropy",
    "confusion",
    "evaluate_scores",
    "summary",
]
