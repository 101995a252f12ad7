"""
SNR-Controlled Mixer
Superimposes a call clip on a noise clip at a target band-level SNR, gates
call clips on their fractile emergence and lays out the p(snr) evaluation grid
"""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger

from ..dsp import CALL_BAND, AudioClip, band_level, fractile_levels, write_wav
from ..exceptions import (
    DurationMismatchError,
    EmptyClipSetError,
    InvalidSpecError,
    SilentClipError,
    UsageError,
)

# Band levels at or below this are treated as silence (undefined SNR)
SILENCE_LEVEL_DB = -150.0

ClipSet = Dict[str, AudioClip]


@dataclass(frozen=True)
class GateCriterion:
    """Minimum L5 - L95 emergence a call clip needs to be used for mixing"""

    min_emergence: float = 20.0
    window_s: float = 0.01

    def __post_init__(self):
        if not self.min_emergence > 0:
            raise InvalidSpecError(f"min_emergence must be > 0, got {self.min_emergence}")
        if not self.window_s > 0:
            raise InvalidSpecError(f"window_s must be > 0, got {self.window_s}")


@dataclass(frozen=True)
class MixSpec:
    """Target SNR (dB) measured in band, plus the clip-selection seed"""

    target_snr: float
    band: Tuple[float, float] = CALL_BAND
    seed: Optional[int] = None

    def __post_init__(self):
        if not math.isfinite(self.target_snr):
            raise InvalidSpecError(f"target_snr must be finite, got {self.target_snr}")


@dataclass(frozen=True)
class MixResult:
    """Peak-normalised mixture plus the audit trail of how it was built"""

    clip: AudioClip
    gain: float
    gain_db: float
    call_level: float
    noise_level: float
    target_snr: float
    peak: float  # peak of noise + gain * call before re-normalisation

    @property
    def raw_samples(self) -> np.ndarray:
        """noise + gain * call, before peak re-normalisation"""
        return self.clip.samples * self.peak

    @property
    def realized_snr(self) -> float:
        return self.call_level + self.gain_db - self.noise_level


def passes_gate(call: AudioClip, gate: Optional[GateCriterion] = None) -> bool:
    """True iff the clip's L5 - L95 in the call band reaches the gate's emergence"""
    gate = gate or GateCriterion()
    levels = fractile_levels(call, gate.window_s, *CALL_BAND)
    return levels.emergence >= gate.min_emergence


def mix_at_snr(call: AudioClip, noise: AudioClip, spec: MixSpec) -> MixResult:
    """
    Mix call into noise so that the band-level difference equals spec.target_snr

    Args:
        call: clip containing the call (scaled by the returned gain)
        noise: background clip (left untouched)
        spec: target SNR and measurement band

    Returns:
        MixResult whose clip is noise + gain * call re-normalised to peak 1
    """
    if call.sample_rate != noise.sample_rate or len(call) != len(noise):
        raise DurationMismatchError(
            f"Call ({len(call)} @ {call.sample_rate} Hz) and noise "
            f"({len(noise)} @ {noise.sample_rate} Hz) differ in length or rate"
        )
    lo, hi = spec.band
    call_level = band_level(call, lo, hi)
    noise_level = band_level(noise, lo, hi)
    if call_level <= SILENCE_LEVEL_DB:
        raise SilentClipError("Call clip is silent in the measurement band; SNR undefined")
    if noise_level <= SILENCE_LEVEL_DB:
        raise SilentClipError("Noise clip is silent in the measurement band; SNR undefined")

    gain_db = spec.target_snr - (call_level - noise_level)
    gain = 10.0 ** (gain_db / 20.0)
    mixed = noise.samples + gain * call.samples
    peak = float(np.max(np.abs(mixed)))
    logger.debug(f"Mix at {spec.target_snr:+.1f} dB: gain {gain_db:+.2f} dB, peak {peak:.3f}")

    return MixResult(
        clip=AudioClip(mixed / peak, call.sample_rate),
        gain=gain,
        gain_db=gain_db,
        call_level=call_level,
        noise_level=noise_level,
        target_snr=spec.target_snr,
        peak=peak,
    )


# ---------------------------------------------------------------------------
# Evaluation grid
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GridTrial:
    """One (call, noise) pair scheduled at one SNR bin"""

    bin_index: int
    index: int
    snr: float
    call_id: str
    noise_id: str


@dataclass
class EvalGrid:
    """
    Lazy p(snr) stimulus grid

    Holds the clip pools and the seeded pair selections; mixtures are built
    on demand so large grids can be streamed.
    """

    snr_values: np.ndarray
    trials: List[List[GridTrial]]
    calls: ClipSet = field(repr=False)
    noises: ClipSet = field(repr=False)
    seed: int = 0

    @property
    def n_bins(self) -> int:
        return len(self.trials)

    @property
    def n_per_point(self) -> int:
        return len(self.trials[0]) if self.trials else 0

    def __len__(self) -> int:
        return sum(len(row) for row in self.trials)

    def iter_trials(self) -> Iterator[GridTrial]:
        for row in self.trials:
            yield from row

    def mixture(self, trial: GridTrial) -> MixResult:
        return mix_at_snr(
            self.calls[trial.call_id],
            self.noises[trial.noise_id],
            MixSpec(target_snr=trial.snr, seed=self.seed),
        )

    def iter_mixtures(self) -> Iterator[Tuple[GridTrial, MixResult]]:
        for trial in self.iter_trials():
            yield trial, self.mixture(trial)


def snr_bins(snr_lo: float, snr_hi: float, step: float) -> np.ndarray:
    """floor((hi - lo) / step) + 1 SNR values starting at lo"""
    if not step > 0:
        raise UsageError(f"SNR step must be > 0, got {step}")
    if snr_hi < snr_lo:
        raise UsageError(f"SNR range is reversed: [{snr_lo}, {snr_hi}]")
    n_bins = int(math.floor((snr_hi - snr_lo) / step + 1e-9)) + 1
    return snr_lo + step * np.arange(n_bins)


def build_eval_grid(
    calls: ClipSet,
    noises: ClipSet,
    snr_lo: float = -30.0,
    snr_hi: float = 10.0,
    step: float = 1.0,
    n_per_point: int = 1000,
    seed: int = 0,
) -> EvalGrid:
    """
    Seeded, with-replacement selection of (call, noise) pairs for every SNR bin

    The generator for trial (bin, index) is keyed by (seed, bin, index), so the
    selection does not depend on execution order.
    """
    if not calls:
        raise EmptyClipSetError("Call clip-set is empty")
    if not noises:
        raise EmptyClipSetError("Noise clip-set is empty")
    if n_per_point < 1:
        raise UsageError(f"n_per_point must be >= 1, got {n_per_point}")

    snr_values = snr_bins(snr_lo, snr_hi, step)
    call_ids = list(calls)
    noise_ids = list(noises)

    trials: List[List[GridTrial]] = []
    for b, snr in enumerate(snr_values):
        row = []
        for i in range(n_per_point):
            rng = np.random.default_rng([seed, b, i])
            row.append(
                GridTrial(
                    bin_index=b,
                    index=i,
                    snr=float(snr),
                    call_id=call_ids[int(rng.integers(len(call_ids)))],
                    noise_id=noise_ids[int(rng.integers(len(noise_ids)))],
                )
            )
        trials.append(row)

    logger.info(
        f"🎛️ Evaluation grid: {len(snr_values)} SNR bins x {n_per_point} mixtures "
        f"from {len(call_ids)} calls and {len(noise_ids)} noises"
    )
    return EvalGrid(snr_values=snr_values, trials=trials, calls=calls, noises=noises, seed=seed)


def materialize_grid(grid: EvalGrid, out_dir: Union[str, Path]) -> pd.DataFrame:
    """
    Write every grid mixture as a WAV file plus manifest.csv

    Returns:
        Manifest DataFrame (path, snr_bin, call_id, noise_id, gain_dB)
    """
    out_dir = Path(out_dir)
    rows = []
    for trial, result in grid.iter_mixtures():
        rel = Path(f"bin{trial.bin_index:03d}") / f"trial{trial.index:05d}.wav"
        write_wav(out_dir / rel, result.clip)
        rows.append(
            {
                "path": rel.as_posix(),
                "snr_bin": trial.snr,
                "call_id": trial.call_id,
                "noise_id": trial.noise_id,
                "gain_dB": round(result.gain_db, 6),
            }
        )
    manifest = pd.DataFrame(rows, columns=["path", "snr_bin", "call_id", "noise_id", "gain_dB"])
    manifest.to_csv(out_dir / "manifest.csv", index=False)
    logger.info(f"💾 Materialised {len(manifest)} grid mixtures to {out_dir}")
    return manifest
