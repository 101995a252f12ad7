"""
Scalar summaries of a p(snr) curve: snr_50, the slope at 50% (infl_50) and
the SNR interval between two detection levels, either from the fitted
logistic or directly from the measured rates
"""

from dataclasses import asdict, dataclass, field
from typing import List, Optional

import numpy as np
from sklearn.isotonic import IsotonicRegression

from ..exceptions import LevelNotReachedError, UsageError
from .curve import PsychometricCurve
from .fitting import Points, curve_arrays
from .logistic import LogisticFit


@dataclass(frozen=True)
class FitMetrics:
    """snr_50 (dB), infl_50 (per dB) and the [snr_lo, snr_hi] interval (dB)"""

    snr_50: Optional[float]
    infl_50: Optional[float]
    snr_lo: Optional[float]
    snr_hi: Optional[float]
    p_lo: float
    p_hi: float
    source: str  # "fit" or "empirical"
    unavailable: List[float] = field(default_factory=list)

    @property
    def interval_width(self) -> Optional[float]:
        if self.snr_lo is None or self.snr_hi is None:
            return None
        return self.snr_hi - self.snr_lo

    def to_dict(self) -> dict:
        data = asdict(self)
        data["interval_width"] = self.interval_width
        return data


def _check_levels(p_lo: float, p_hi: float) -> None:
    for p in (p_lo, p_hi):
        if not 0.0 < p < 1.0:
            raise UsageError(f"Detection level must lie in (0, 1), got {p}")
    if not p_lo < p_hi:
        raise UsageError(f"p_lo ({p_lo}) must be below p_hi ({p_hi})")


def metrics_from_fit(fit: LogisticFit, p_lo: float = 0.05, p_hi: float = 0.95) -> FitMetrics:
    """Closed-form metrics of a fitted curve"""
    _check_levels(p_lo, p_hi)
    return FitMetrics(
        snr_50=fit.snr_50,
        infl_50=fit.infl_50,
        snr_lo=float(fit.snr_at(p_lo)),
        snr_hi=float(fit.snr_at(p_hi)),
        p_lo=p_lo,
        p_hi=p_hi,
        source="fit",
    )


def smoothed_rates(points: Points) -> tuple:
    """(snr, rates) sorted by SNR with pool-adjacent-violators smoothing"""
    snr, n, s = curve_arrays(points)
    order = np.argsort(snr)
    snr, n, s = snr[order], n[order], s[order]
    iso = IsotonicRegression(increasing=True, y_min=0.0, y_max=1.0)
    rates = iso.fit_transform(snr, s / n, sample_weight=n)
    return snr, rates


def empirical_crossing(points: Points, level: float) -> float:
    """
    SNR where the smoothed rates first reach `level`

    Linear interpolation inside the first adjacent bin pair that brackets
    the level.
    """
    if not 0.0 < level < 1.0:
        raise UsageError(f"Detection level must lie in (0, 1), got {level}")
    snr, rates = smoothed_rates(points)
    reached = np.nonzero(rates >= level)[0]
    if reached.size == 0:
        raise LevelNotReachedError(level)
    i = reached[0]
    if i == 0:
        if rates[0] == level:
            return float(snr[0])
        raise LevelNotReachedError(level)
    r0, r1 = rates[i - 1], rates[i]
    return float(snr[i - 1] + (level - r0) / (r1 - r0) * (snr[i] - snr[i - 1]))


def metrics_empirical(
    points: Points, p_lo: float = 0.05, p_hi: float = 0.95, strict: bool = False
) -> FitMetrics:
    """
    Metrics read off the measured rates instead of the fit

    snr_50 is required. Levels p_lo / p_hi that the rates never cross raise
    LevelNotReachedError when strict, otherwise they are reported as None and
    listed in `unavailable`.
    """
    _check_levels(p_lo, p_hi)
    snr_50 = empirical_crossing(points, 0.5)

    snr, rates = smoothed_rates(points)
    step = float(np.median(np.diff(snr))) if snr.size > 1 else 1.0
    up = np.interp(snr_50 + step, snr, rates)
    down = np.interp(snr_50 - step, snr, rates)
    infl_50 = float((up - down) / (2.0 * step))

    bounds = {}
    unavailable = []
    for level in (p_lo, p_hi):
        try:
            bounds[level] = empirical_crossing(points, level)
        except LevelNotReachedError:
            if strict:
                raise
            bounds[level] = None
            unavailable.append(level)

    return FitMetrics(
        snr_50=snr_50,
        infl_50=infl_50,
        snr_lo=bounds[p_lo],
        snr_hi=bounds[p_hi],
        p_lo=p_lo,
        p_hi=p_hi,
        source="empirical",
        unavailable=unavailable,
    )


def summarize_curve(
    curve: PsychometricCurve, p_lo: float = 0.05, p_hi: float = 0.95
) -> PsychometricCurve:
    """Attach both metric variants to a fitted curve (curve.metrics)"""
    if curve.fit is None:
        raise UsageError(f"Curve '{curve.label}' has no fit")
    curve.metrics["fit"] = metrics_from_fit(curve.fit, p_lo, p_hi)
    try:
        curve.metrics["empirical"] = metrics_empirical(curve, p_lo, p_hi)
    except LevelNotReachedError:
        curve.metrics["empirical"] = None
    return curve
