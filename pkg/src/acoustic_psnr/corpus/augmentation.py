"""
Targeted SNR augmentation (trainAugm)

Gate-passing positives are superimposed on negatives at SNRs drawn uniformly
from a window. The window is either given explicitly or read off a measured
p(snr) curve: above the curve (high), on its transition (transition) or
below it (low).
"""

import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger

from ..exceptions import EmptyClipSetError, LevelNotReachedError, UsageError
from ..mixing import GateCriterion, MixSpec, mix_at_snr, passes_gate
from ..psychometric import LogisticFit, PsychometricCurve
from .dataset import LabeledClip

DEFAULT_AUGM_FRACTION = 0.20
DEFAULT_WINDOW_DB = 10.0
HIGH_LEVEL = 0.99
LOW_LEVEL = 0.01
AUGM_MODES = ("high", "transition", "low")


@dataclass(frozen=True)
class TrainingConfiguration:
    """One training configuration: no augmentation or an SNR window"""

    name: str
    snr_range: Optional[Tuple[float, float]]
    mode: Optional[str]
    description: str


TRAINING_CONFIGURATIONS: Dict[str, TrainingConfiguration] = {
    "conf0": TrainingConfiguration("conf0", None, None, "no augmentation"),
    "conf1": TrainingConfiguration("conf1", (0.0, 10.0), "high", "p0(snr) > 0.99"),
    "conf2": TrainingConfiguration("conf2", (-16.0, -6.0), "transition", "0.12 < p0(snr) < 0.88"),
    "conf3": TrainingConfiguration("conf3", (-36.0, -26.0), "low", "p0(snr) < 0.01"),
}


def build_train_augm(
    positives: Sequence[LabeledClip],
    negatives: Sequence[LabeledClip],
    snr_range: Tuple[float, float],
    fraction: float = DEFAULT_AUGM_FRACTION,
    seed: int = 0,
    gate: Optional[GateCriterion] = None,
) -> List[LabeledClip]:
    """
    Build the augmented positive set

    Args:
        positives: positive clips (only those passing the gate are used)
        negatives: noise clips the calls are laid over
        snr_range: (lo, hi) SNR window in dB
        fraction: augmented count as a fraction of len(positives)
        seed: selection / SNR seed; item i uses a generator keyed by (seed, i)
        gate: emergence gate (20 dB over 10 ms windows by default)

    Returns:
        round(fraction * len(positives)) positive LabeledClips
    """
    lo, hi = snr_range
    if not lo <= hi:
        raise UsageError(f"SNR range is reversed: [{lo}, {hi}]")
    if not 0.0 < fraction <= 1.0:
        raise UsageError(f"fraction must lie in (0, 1], got {fraction}")
    if not negatives:
        raise EmptyClipSetError("No negative clips to mix over")

    eligible = [c for c in positives if passes_gate(c.clip, gate)]
    if not eligible:
        raise EmptyClipSetError(
            f"None of the {len(positives)} positive clips passes the emergence gate"
        )
    count = int(round(fraction * len(positives)))
    logger.info(
        f"➕ Augmenting with {count} mixtures in [{lo:+.1f}, {hi:+.1f}] dB "
        f"from {len(eligible)}/{len(positives)} gate-passing calls"
    )

    augmented = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        c = int(rng.integers(len(eligible)))
        n = int(rng.integers(len(negatives)))
        snr = float(rng.uniform(lo, hi))
        call, noise = eligible[c], negatives[n]
        result = mix_at_snr(call.clip, noise.clip, MixSpec(target_snr=snr))
        augmented.append(
            LabeledClip(
                clip=result.clip,
                label=True,
                session_id=call.session_id,
                split=call.split,
                generator_spec={
                    "augm": True,
                    "snr": snr,
                    "gain_db": result.gain_db,
                    "call_index": c,
                    "noise_index": n,
                },
            )
        )
    return augmented


def select_augm_range_from_curve(
    curve: Union[PsychometricCurve, LogisticFit],
    mode: str,
    width_db: float = DEFAULT_WINDOW_DB,
) -> Tuple[float, float]:
    """
    Augmentation window derived from a fitted p(snr) curve

    transition: width_db window centred on snr_50
    high: window starting where p reaches 0.99
    low: window ending where p falls to 0.01
    """
    fit = curve.fit if isinstance(curve, PsychometricCurve) else curve
    if fit is None:
        raise UsageError("Curve has no fit; run fit_mle first")
    if mode not in AUGM_MODES:
        raise UsageError(f"Unknown augmentation mode '{mode}', expected one of {AUGM_MODES}")
    if not width_db > 0:
        raise UsageError(f"width_db must be > 0, got {width_db}")

    if mode == "transition":
        anchor, level = fit.snr_50, 0.5
        window = (anchor - width_db / 2.0, anchor + width_db / 2.0)
    elif mode == "high":
        anchor, level = fit.snr_at(HIGH_LEVEL), HIGH_LEVEL
        window = (anchor, anchor + width_db)
    else:
        anchor, level = fit.snr_at(LOW_LEVEL), LOW_LEVEL
        window = (anchor - width_db, anchor)

    if not math.isfinite(anchor):
        raise LevelNotReachedError(level)
    return float(window[0]), float(window[1])
