"""
Psychometric curves

Measures a detector's detection rate against SNR on an evaluation grid,
fits the three-parameter generalised logistic by maximum likelihood,
bootstraps the fit and reduces it to scalar metrics (snr_50, infl_50 and
the transition interval).
"""

from .curve import CurvePoint, PsychometricCurve, measure_curve, simulate_curve
from .fitting import BootstrapResult, bootstrap_ci, fit_mle, negative_log_likelihood
from .logistic import (
    LogisticFit,
    logistic_p,
    logistic_slope,
    slope_at_half,
    snr_at_probability,
)
from .metrics import (
    FitMetrics,
    empirical_crossing,
    metrics_empirical,
    metrics_from_fit,
    smoothed_rates,
    summarize_curve,
)

__all__ = [
    "CurvePoint",
    "PsychometricCurve",
    "measure_curve",
    "simulate_curve",
    "BootstrapResult",
    "bootstrap_ci",
    "fit_mle",
    "negative_log_likelihood",
    "LogisticFit",
    "logistic_p",
    "logistic_slope",
    "slope_at_half",
    "snr_at_probability",
    "FitMetrics",
    "empirical_crossing",
    "metrics_empirical",
    "metrics_from_fit",
    "smoothed_rates",
    "summarize_curve",
]
