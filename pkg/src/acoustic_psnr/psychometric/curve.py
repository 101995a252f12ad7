"""
Measured p(snr) Curves
Per-bin detection counts from running a detector over an evaluation grid
"""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd
from joblib import Parallel, delayed
from loguru import logger

from ..detector import Detector
from ..exceptions import DetectorFailureError, UsageError
from ..mixing import EvalGrid, GridTrial
from .logistic import LogisticFit, logistic_p


@dataclass(frozen=True)
class CurvePoint:
    """Detection count at one SNR bin; outcomes keep the per-trial decisions"""

    snr: float
    n_trials: int
    n_detected: int
    outcomes: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.n_trials < 1:
            raise UsageError(f"Bin at {self.snr} dB has no trials")
        if not 0 <= self.n_detected <= self.n_trials:
            raise UsageError(
                f"Bin at {self.snr} dB: {self.n_detected} detections out of {self.n_trials} trials"
            )

    @property
    def detect_rate(self) -> float:
        return self.n_detected / self.n_trials

    @classmethod
    def from_outcomes(cls, snr: float, outcomes: Sequence[bool]) -> "CurvePoint":
        outcomes = np.asarray(outcomes, dtype=bool)
        outcomes.setflags(write=False)
        return cls(float(snr), int(outcomes.size), int(outcomes.sum()), outcomes)


@dataclass
class PsychometricCurve:
    """Measured points plus (once computed) the fit, bootstrap and metrics"""

    points: List[CurvePoint]
    label: str = "all"
    fit: Optional[LogisticFit] = None
    bootstrap: Optional[Any] = None  # BootstrapResult
    metrics: Dict[str, Any] = field(default_factory=dict)

    @property
    def snr(self) -> np.ndarray:
        return np.array([p.snr for p in self.points])

    @property
    def n_trials(self) -> np.ndarray:
        return np.array([p.n_trials for p in self.points])

    @property
    def n_detected(self) -> np.ndarray:
        return np.array([p.n_detected for p in self.points])

    @property
    def detect_rates(self) -> np.ndarray:
        return self.n_detected / self.n_trials

    def to_frame(self) -> pd.DataFrame:
        """One row per bin: snr, rate, n, detected (+ fit columns when fitted)"""
        frame = pd.DataFrame(
            {
                "snr": self.snr,
                "rate": self.detect_rates,
                "n": self.n_trials,
                "detected": self.n_detected,
            }
        )
        if self.fit is not None:
            frame["fit_p"] = self.fit.p(self.snr)
            frame["x0"] = self.fit.x0
            frame["k"] = self.fit.k
            frame["v"] = self.fit.v
        return frame

    @classmethod
    def from_frame(cls, frame: pd.DataFrame, label: str = "all") -> "PsychometricCurve":
        """Rebuild points from a rates table (snr, n and either detected or rate)"""
        missing = {"snr", "n"} - set(frame.columns)
        if missing:
            raise UsageError(f"Rates table lacks columns {sorted(missing)}")
        if "detected" in frame.columns:
            detected = frame["detected"].to_numpy()
        elif "rate" in frame.columns:
            detected = np.rint(frame["rate"].to_numpy() * frame["n"].to_numpy())
        else:
            raise UsageError("Rates table needs a 'detected' or a 'rate' column")
        points = [
            CurvePoint(float(s), int(n), int(d))
            for s, n, d in zip(frame["snr"], frame["n"], detected)
        ]
        return cls(points=points, label=label)


def simulate_curve(
    fit: LogisticFit, snr_values: Sequence[float], n_trials: int, seed: int = 0, label: str = "simulated"
) -> PsychometricCurve:
    """Bernoulli outcomes drawn from a known logistic (the generator is the oracle)"""
    points = []
    for b, snr in enumerate(snr_values):
        rng = np.random.default_rng([seed, b])
        outcomes = rng.random(n_trials) < logistic_p(snr, fit.x0, fit.k, fit.v)
        points.append(CurvePoint.from_outcomes(snr, outcomes))
    return PsychometricCurve(points=points, label=label)


def _manifest_entry(trial: GridTrial) -> Dict[str, Any]:
    return {
        "path": f"bin{trial.bin_index:03d}/trial{trial.index:05d}.wav",
        "snr_bin": trial.snr,
        "call_id": trial.call_id,
        "noise_id": trial.noise_id,
    }


def _measure_bin(detector: Detector, grid: EvalGrid, row: List[GridTrial]) -> CurvePoint:
    clips = [grid.mixture(trial).clip for trial in row]
    try:
        scores = detector.score_many(clips)
    except Exception:
        # Re-run one by one to find the clip that broke the detector
        scores = []
        for trial, clip in zip(row, clips):
            try:
                scores.append(detector.score(clip))
            except Exception as e:
                entry = _manifest_entry(trial)
                raise DetectorFailureError(
                    f"Detector '{detector.name}' failed on {entry['path']} "
                    f"(snr {trial.snr:+.1f} dB, call {trial.call_id}, noise {trial.noise_id}): {e}",
                    detail=entry,
                ) from e
    return CurvePoint.from_outcomes(row[0].snr, [score.decision for score in scores])


def measure_curve(
    detector: Detector, grid: EvalGrid, n_jobs: int = 1, label: str = "all"
) -> PsychometricCurve:
    """
    Detection rate per SNR bin of the grid

    Rates are means of binary decisions (probability > 0.5), not of the raw
    probabilities. Bins are processed in parallel threads; results are kept
    in grid order.

    Args:
        detector: any Detector
        grid: evaluation grid (mixtures are built on demand)
        n_jobs: worker threads
        label: curve label (e.g. the noise kind)

    Returns:
        PsychometricCurve with points only
    """
    if len(grid) == 0:
        raise UsageError("Evaluation grid is empty")

    logger.info(
        f"📈 Measuring p(snr) for '{detector.name}' over {grid.n_bins} bins x {grid.n_per_point} trials"
    )
    points = Parallel(n_jobs=n_jobs, prefer="threads")(
        delayed(_measure_bin)(detector, grid, row) for row in grid.trials
    )
    curve = PsychometricCurve(points=list(points), label=label)
    logger.info(
        f"📊 Rates from {curve.detect_rates.min():.3f} to {curve.detect_rates.max():.3f} "
        f"({label})"
    )
    return curve
