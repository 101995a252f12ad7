"""
Maximum-likelihood fitting and bootstrap of the generalised logistic

The Bernoulli negative log-likelihood is minimised with a multi-start
Nelder-Mead simplex over (x0, ln k, ln v), which keeps k and v positive
without constraints.
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from loguru import logger
from scipy.optimize import minimize

from ..exceptions import BootstrapError, CurveNotIdentifiableError, NumericalError
from .curve import CurvePoint, PsychometricCurve
from .logistic import LogisticFit

PROBABILITY_CLAMP = 1e-12
START_OFFSETS_DB = (0.0, -3.0, 3.0)
START_SLOPES = (0.3, 0.7)
SIMPLEX_XATOL = 1e-6
SIMPLEX_MAXITER = 2000
POLISH_TOLERANCE = 1e-8
MAX_BOOTSTRAP_FAILURE_RATE = 0.2

# ln k and ln v are kept inside this box while evaluating the likelihood
_LOG_PARAM_LIMIT = 25.0

Points = Union[PsychometricCurve, Sequence[CurvePoint]]


def curve_arrays(points: Points) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if isinstance(points, PsychometricCurve):
        points = points.points
    snr = np.array([p.snr for p in points], dtype=np.float64)
    n = np.array([p.n_trials for p in points], dtype=np.float64)
    s = np.array([p.n_detected for p in points], dtype=np.float64)
    return snr, n, s


def negative_log_likelihood(
    theta: np.ndarray, snr: np.ndarray, n: np.ndarray, s: np.ndarray
) -> float:
    """Bernoulli NLL for theta = (x0, ln k, ln v), p clamped to [1e-12, 1 - 1e-12]"""
    x0 = theta[0]
    k = np.exp(np.clip(theta[1], -_LOG_PARAM_LIMIT, _LOG_PARAM_LIMIT))
    v = np.exp(np.clip(theta[2], -_LOG_PARAM_LIMIT, _LOG_PARAM_LIMIT))
    log_p = -v * np.logaddexp(0.0, -k * (snr - x0))
    p = np.clip(np.exp(log_p), PROBABILITY_CLAMP, 1.0 - PROBABILITY_CLAMP)
    return float(-np.sum(s * np.log(p) + (n - s) * np.log1p(-p)))


def _check_identifiable(snr: np.ndarray, n: np.ndarray, s: np.ndarray) -> None:
    if np.unique(snr).size < 3:
        raise CurveNotIdentifiableError(
            f"Curve not identifiable: {np.unique(snr).size} distinct SNR bins, at least 3 needed"
        )
    if np.all(s == 0) or np.all(s == n):
        raise CurveNotIdentifiableError(
            "Curve not identifiable: detection rates are all 0 or all 1",
            detail={"n_detected": int(s.sum()), "n_trials": int(n.sum())},
        )


def half_crossing(snr: np.ndarray, rates: np.ndarray) -> float:
    """Rough SNR of the first 0.5 crossing, used to seed the optimiser"""
    order = np.argsort(snr)
    snr, rates = snr[order], rates[order]
    above = np.nonzero(rates >= 0.5)[0]
    if above.size == 0:
        return float(snr[-1])
    i = above[0]
    if i == 0:
        return float(snr[0])
    r0, r1 = rates[i - 1], rates[i]
    return float(snr[i - 1] + (0.5 - r0) / (r1 - r0) * (snr[i] - snr[i - 1]))


def _simplex(theta0: np.ndarray, snr, n, s) -> Tuple[np.ndarray, float]:
    result = minimize(
        negative_log_likelihood,
        theta0,
        args=(snr, n, s),
        method="Nelder-Mead",
        options={"xatol": SIMPLEX_XATOL, "fatol": 1e-12, "maxiter": SIMPLEX_MAXITER},
    )
    return result.x, float(result.fun)


def fit_mle(points: Points, starts: Optional[Iterable[LogisticFit]] = None) -> LogisticFit:
    """
    Maximum-likelihood generalised-logistic fit

    Args:
        points: measured curve (or its points)
        starts: optional explicit starting fits; by default six starts are
            used (x0 at the empirical 0.5 crossing and +-3 dB, k in {0.3, 0.7},
            v = 1)

    The default grid is 3 offsets x 2 slopes, so six optimiser runs.

    Returns:
        LogisticFit carrying the minimised negative log-likelihood
    """
    snr, n, s = curve_arrays(points)
    _check_identifiable(snr, n, s)

    if starts is None:
        centre = half_crossing(snr, s / n)
        thetas = [
            np.array([centre + dx, np.log(k), 0.0]) for dx in START_OFFSETS_DB for k in START_SLOPES
        ]
    else:
        thetas = [np.array([f.x0, np.log(f.k), np.log(f.v)]) for f in starts]

    best_theta, best_nll = None, np.inf
    for theta0 in thetas:
        theta, nll = _simplex(theta0, snr, n, s)
        if nll < best_nll:
            best_theta, best_nll = theta, nll

    # Restart from the optimum until a fresh simplex stops improving
    for _ in range(5):
        theta, nll = _simplex(best_theta, snr, n, s)
        improved = best_nll - nll
        if nll < best_nll:
            best_theta, best_nll = theta, nll
        if improved <= POLISH_TOLERANCE:
            break

    if not np.all(np.isfinite(best_theta)) or not np.isfinite(best_nll):
        raise NumericalError(f"Fit did not converge (theta={best_theta}, nll={best_nll})")

    k, v = np.exp(np.clip(best_theta[1:], -_LOG_PARAM_LIMIT, _LOG_PARAM_LIMIT))
    return LogisticFit(x0=float(best_theta[0]), k=float(k), v=float(v), nll=best_nll)


# ---------------------------------------------------------------------------
# Bootstrap
# ---------------------------------------------------------------------------


@dataclass
class BootstrapResult:
    """Percentile intervals from case-resampled refits"""

    n_boot: int
    n_failed: int
    samples: pd.DataFrame = field(repr=False)
    intervals: Dict[str, Tuple[float, float]] = field(default_factory=dict)
    confidence: float = 0.95

    def width(self, name: str) -> float:
        lo, hi = self.intervals[name]
        return hi - lo

    def to_dict(self) -> dict:
        return {
            "n_boot": self.n_boot,
            "n_failed": self.n_failed,
            "confidence": self.confidence,
            "intervals": {name: list(bounds) for name, bounds in self.intervals.items()},
        }


def _replicate(
    index: int,
    seed: int,
    snr: np.ndarray,
    n: np.ndarray,
    s: np.ndarray,
    start: LogisticFit,
    p_lo: float,
    p_hi: float,
) -> Optional[Dict[str, float]]:
    rng = np.random.default_rng([seed, index])
    # Resampling n outcomes with replacement from a bin with s successes
    # is a Binomial(n, s / n) draw
    counts = rng.binomial(n.astype(np.int64), s / n)
    points = [CurvePoint(float(x), int(m), int(c)) for x, m, c in zip(snr, n, counts)]
    try:
        fit = fit_mle(points, starts=[start])
    except NumericalError:
        return None
    return {
        "x0": fit.x0,
        "k": fit.k,
        "v": fit.v,
        "snr_50": fit.snr_50,
        "infl_50": fit.infl_50,
        "snr_lo": float(fit.snr_at(p_lo)),
        "snr_hi": float(fit.snr_at(p_hi)),
    }


def bootstrap_ci(
    points: Points,
    n_boot: int = 1000,
    seed: int = 0,
    fit: Optional[LogisticFit] = None,
    n_jobs: int = 1,
    p_lo: float = 0.05,
    p_hi: float = 0.95,
    confidence: float = 0.95,
) -> BootstrapResult:
    """
    Nonparametric bootstrap of the fit

    Each replicate resamples every bin's outcomes with replacement and refits
    (starting from the full-data fit). Replicate r draws from a generator
    keyed by (seed, r), so results do not depend on scheduling.

    Returns:
        BootstrapResult with percentile intervals for x0, k, v, snr_50,
        infl_50 and the (p_lo, p_hi) interval bounds
    """
    if n_boot < 1:
        raise BootstrapError(f"n_boot must be >= 1, got {n_boot}")
    snr, n, s = curve_arrays(points)
    fit = fit or fit_mle(points)

    logger.info(f"🎲 Bootstrapping {n_boot} refits ({n_jobs} threads)")
    rows: List[Optional[Dict[str, float]]] = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_replicate)(r, seed, snr, n, s, fit, p_lo, p_hi) for r in range(n_boot)
    )
    failed = [r for r, row in enumerate(rows) if row is None]
    if len(failed) > MAX_BOOTSTRAP_FAILURE_RATE * n_boot:
        raise BootstrapError(
            f"{len(failed)} of {n_boot} bootstrap refits failed",
            detail={"failed_replicates": failed[:20], "n_boot": n_boot},
        )
    if failed:
        logger.warning(f"⚠️ {len(failed)} of {n_boot} bootstrap refits failed and were skipped")

    samples = pd.DataFrame([row for row in rows if row is not None])
    tail = 100.0 * (1.0 - confidence) / 2.0
    intervals = {
        name: (
            float(np.percentile(samples[name], tail)),
            float(np.percentile(samples[name], 100.0 - tail)),
        )
        for name in samples.columns
    }
    lo, hi = intervals["snr_50"]
    logger.info(f"📏 snr_50 {100 * confidence:.0f}% CI: [{lo:.2f}, {hi:.2f}] dB")
    return BootstrapResult(
        n_boot=n_boot, n_failed=len(failed), samples=samples, intervals=intervals, confidence=confidence
    )
