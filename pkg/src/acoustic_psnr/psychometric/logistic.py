"""
Generalised logistic psychometric function

    p(snr) = (1 + exp(-k * (snr - x0))) ** (-v),   k > 0, v > 0

All evaluations go through log-space forms so the tails saturate to 0 / 1
instead of overflowing.
"""

from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np

from ..exceptions import UsageError


def _check_shape(k: float, v: float) -> None:
    if not (k > 0 and v > 0):
        raise UsageError(f"Logistic needs k > 0 and v > 0, got k={k}, v={v}")


def _check_probability(p) -> None:
    p = np.asarray(p, dtype=np.float64)
    if np.any(~np.isfinite(p)) or np.any(p <= 0.0) or np.any(p >= 1.0):
        raise UsageError(f"Probability must lie in the open interval (0, 1), got {p}")


def log_logistic_p(snr, x0: float, k: float, v: float):
    """ln p(snr)"""
    _check_shape(k, v)
    z = -k * (np.asarray(snr, dtype=np.float64) - x0)
    return -v * np.logaddexp(0.0, z)


def logistic_p(snr, x0: float, k: float, v: float):
    """
    Detection probability at snr (scalar or array)

    Args:
        snr: SNR value(s) in dB
        x0: inflection location (dB)
        k: growth rate (per dB), > 0
        v: asymmetry exponent, > 0
    """
    p = np.exp(log_logistic_p(snr, x0, k, v))
    return float(p) if np.ndim(p) == 0 else p


def snr_at_probability(p, x0: float, k: float, v: float):
    """Closed-form inverse: snr_p = x0 - ln(p^(-1/v) - 1) / k"""
    _check_shape(k, v)
    _check_probability(p)
    p = np.asarray(p, dtype=np.float64)
    snr = x0 - np.log(np.expm1(-np.log(p) / v)) / k
    return float(snr) if np.ndim(snr) == 0 else snr


def logistic_slope(snr, x0: float, k: float, v: float):
    """dp/dsnr = v * k * e^z * (1 + e^z)^(-v-1), z = -k (snr - x0)"""
    _check_shape(k, v)
    z = -k * (np.asarray(snr, dtype=np.float64) - x0)
    slope = v * k * np.exp(z - (v + 1.0) * np.logaddexp(0.0, z))
    return float(slope) if np.ndim(slope) == 0 else slope


def slope_at_half(k: float, v: float) -> float:
    """Slope at the p = 0.5 point: k v (2^(1/v) - 1) 2^(-(v+1)/v)"""
    _check_shape(k, v)
    return float(k * v * (2.0 ** (1.0 / v) - 1.0) * 2.0 ** (-(v + 1.0) / v))


@dataclass(frozen=True)
class LogisticFit:
    """Fitted (x0, k, v) with the negative log-likelihood it reached"""

    x0: float
    k: float
    v: float
    nll: Optional[float] = None

    def __post_init__(self):
        _check_shape(self.k, self.v)

    def p(self, snr):
        return logistic_p(snr, self.x0, self.k, self.v)

    def snr_at(self, p):
        return snr_at_probability(p, self.x0, self.k, self.v)

    @property
    def snr_50(self) -> float:
        return self.snr_at(0.5)

    @property
    def infl_50(self) -> float:
        return slope_at_half(self.k, self.v)

    def shifted(self, dx0: float) -> "LogisticFit":
        return LogisticFit(self.x0 + dx0, self.k, self.v, self.nll)

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)
