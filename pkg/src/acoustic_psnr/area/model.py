"""
Detection Area Model
Spherical spreading from an omnidirectional source: the SNR a detector
needs for detection probability p fixes the largest distance (and disc area)
at which a call is still detected with that probability
"""

import math
from dataclasses import dataclass, replace
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from ..exceptions import UsageError
from ..psychometric import LogisticFit

DEFAULT_SOURCE_LEVEL_DB = 85.0
SOURCE_LEVEL_UNCERTAINTY_DB = 2.0
REFERENCE_PRESSURE_UPA = 20.0
FULL_SCALE_COUNTS = 32768

# Recorder sensitivities in µPa per 16-bit count
RECORDER_SENSITIVITY_UPA: Dict[str, float] = {
    "france": 0.2,
    "norway": 12.6,
}


def calibration_offset_db(sensitivity_upa: float) -> float:
    """SPL (dB re 20 µPa) of a one-count signal for the given sensitivity"""
    if not sensitivity_upa > 0:
        raise UsageError(f"Sensitivity must be positive, got {sensitivity_upa}")
    return 20.0 * math.log10(sensitivity_upa / REFERENCE_PRESSURE_UPA)


def dbfs_to_spl(level_dbfs: float, sensitivity_upa: float) -> float:
    """Convert a recorder level in dBFS (16-bit full scale) to dB SPL"""
    return level_dbfs + 20.0 * math.log10(FULL_SCALE_COUNTS) + calibration_offset_db(sensitivity_upa)


@dataclass(frozen=True)
class AreaModelParams:
    """
    Inputs of the detection-area model

    Levels only matter through their differences, so any consistent dB scale
    works. noise_level + calibration_offset is the noise level on the same
    scale as source_level_1m (offset 0 when noise_level is already SPL).
    """

    fit: LogisticFit
    noise_level: float
    source_level_1m: float = DEFAULT_SOURCE_LEVEL_DB
    calibration_offset: float = 0.0
    source_level_uncertainty: float = SOURCE_LEVEL_UNCERTAINTY_DB

    @property
    def effective_noise_level(self) -> float:
        return self.noise_level + self.calibration_offset

    def with_noise(self, noise_level: float) -> "AreaModelParams":
        return replace(self, noise_level=noise_level)

    def with_source_level(self, source_level_1m: float) -> "AreaModelParams":
        return replace(self, source_level_1m=source_level_1m)


def level_at_distance(source_level_1m: float, r: float) -> float:
    """Spherical spreading: L(r) = L(1 m) - 20 log10(r), r >= 1 m"""
    if not r >= 1.0:
        raise UsageError(f"Distance must be >= 1 m, got {r}")
    return source_level_1m - 20.0 * math.log10(r)


def detection_radius(p: float, params: AreaModelParams) -> float:
    """
    Largest distance (m) at which the call still reaches detection probability p

    snr_p is the logistic inverted at p; then
    r = 10 ** ((L1m - Ln - snr_p) / 20).
    """
    snr_p = params.fit.snr_at(p)
    margin = params.source_level_1m - params.effective_noise_level - snr_p
    return max(0.0, 10.0 ** (margin / 20.0))


def detection_area(p: float, params: AreaModelParams) -> float:
    """Disc area (m²) of radius detection_radius(p)"""
    return math.pi * detection_radius(p, params) ** 2


def detection_area_factored(p: float, params: AreaModelParams) -> float:
    """
    Same area written as a product of powers:

        pi * 10^(L1m/10) * 10^(-Ln/10) * 10^(-x0/10) * (p^(-1/v) - 1)^(ln 10 / (10 k))
    """
    if not 0.0 < p < 1.0:
        raise UsageError(f"Probability must lie in (0, 1), got {p}")
    fit = params.fit
    q = math.expm1(-math.log(p) / fit.v)
    return (
        math.pi
        * 10.0 ** (params.source_level_1m / 10.0)
        * 10.0 ** (-params.effective_noise_level / 10.0)
        * 10.0 ** (-fit.x0 / 10.0)
        * q ** (math.log(10.0) / (10.0 * fit.k))
    )


def radius_range(p: float, params: AreaModelParams) -> Tuple[float, float, float]:
    """(low, mid, high) radius for the source level -/0/+ its uncertainty"""
    delta = params.source_level_uncertainty
    return tuple(
        detection_radius(p, params.with_source_level(params.source_level_1m + d))
        for d in (-delta, 0.0, delta)
    )


def area_range(p: float, params: AreaModelParams) -> Tuple[float, float, float]:
    return tuple(math.pi * r**2 for r in radius_range(p, params))


def area_vs_noise_table(
    p: float, params: AreaModelParams, noise_levels: Sequence[float], label: Optional[str] = None
) -> pd.DataFrame:
    """
    Radius and area for each noise level

    Returns:
        DataFrame with noise_level, radius_m, area_m2 and the low/high bounds
        from the source-level uncertainty (plus a `label` column when given)
    """
    if len(noise_levels) == 0:
        raise UsageError("No noise levels given")
    rows = []
    for level in noise_levels:
        at_level = params.with_noise(float(level))
        r_lo, r_mid, r_hi = radius_range(p, at_level)
        rows.append(
            {
                "noise_level": float(level),
                "p": p,
                "radius_m": r_mid,
                "area_m2": math.pi * r_mid**2,
                "radius_lo_m": r_lo,
                "radius_hi_m": r_hi,
                "area_lo_m2": math.pi * r_lo**2,
                "area_hi_m2": math.pi * r_hi**2,
            }
        )
    table = pd.DataFrame(rows)
    if label is not None:
        table.insert(0, "label", label)
    return table


def area_ratio_for_noise_change(delta_db: float) -> float:
    """Area multiplier when the noise level rises by delta_db"""
    return float(np.power(10.0, -delta_db / 10.0))
