"""
SVG figures: measured p(snr) with its fitted curve, and detection area
against noise level
"""

from pathlib import Path
from typing import Dict, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
import pandas as pd  # noqa: E402

from ..psychometric import PsychometricCurve  # noqa: E402

# Fixed ids and no timestamp keep SVG output byte-identical across runs
plt.rcParams["svg.hashsalt"] = "acoustic-psnr"
_SVG_METADATA = {"Date": None}


def _save(fig, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, format="svg", metadata=_SVG_METADATA)
    plt.close(fig)
    return path


def plot_curve(curve: PsychometricCurve, path: Union[str, Path]) -> Path:
    """Detection rates (points) and the fitted logistic (line)"""
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(curve.snr, curve.detect_rates, "o", markersize=3, label="measured")
    if curve.fit is not None:
        grid = np.linspace(curve.snr.min(), curve.snr.max(), 400)
        fit = curve.fit
        ax.plot(
            grid,
            fit.p(grid),
            "-",
            label=f"fit x0={fit.x0:.1f} k={fit.k:.2f} v={fit.v:.2f}",
        )
        ax.axvline(fit.snr_50, linestyle=":", color="grey")
    ax.set_xlabel("SNR (dB)")
    ax.set_ylabel("p(snr)")
    ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"Detection probability ({curve.label})")
    ax.grid(alpha=0.3)
    ax.legend(loc="lower right")
    return _save(fig, path)


def plot_area(tables: Dict[str, pd.DataFrame], path: Union[str, Path]) -> Path:
    """Detection area (km²) against noise level, one line per curve label"""
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, table in sorted(tables.items()):
        ax.plot(table["noise_level"], table["area_m2"] / 1e6, "-o", markersize=3, label=label)
        ax.fill_between(
            table["noise_level"], table["area_lo_m2"] / 1e6, table["area_hi_m2"] / 1e6, alpha=0.15
        )
    ax.set_xlabel("Noise level (dB)")
    ax.set_ylabel("Detection area (km²)")
    ax.set_yscale("log")
    ax.grid(alpha=0.3, which="both")
    ax.legend()
    return _save(fig, path)
