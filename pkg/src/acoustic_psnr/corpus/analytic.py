"""
Analytic stimulus family with closed-form emergence

The "call" is a tone gated on for a fraction `duty` of the 10 ms measurement
windows, the "noise" a steady tone at another frequency. Both tones complete
whole cycles in every window, so they are orthogonal window by window and:

    emergence(snr) = 10 log10(1 + 10^(snr / 10) / duty)

An emergence-threshold detector therefore switches on exactly at

    snr* = 10 log10(duty * (10^(threshold / 10) - 1))
"""

import math
from typing import Dict

import numpy as np

from ..dsp import MODEL_CLIP_SECONDS, MODEL_SAMPLE_RATE, AudioClip
from ..exceptions import InvalidSpecError

WINDOW_S = 0.01
CALL_TONE_HZ = 2000.0
NOISE_TONE_HZ = 1000.0
# Gate blocks span several windows so filter edge transients stay local
BLOCK_WINDOWS = 5


def _check_duty(duty: float) -> None:
    # Both the on and the off windows must be more than 5% of the clip
    if not 0.05 < duty < 0.95:
        raise InvalidSpecError(f"duty must lie in (0.05, 0.95), got {duty}")


def _check_tone(freq: float, sample_rate: int) -> None:
    cycles = freq * WINDOW_S
    if abs(cycles - round(cycles)) > 1e-9 or not 0 < freq < sample_rate / 2:
        raise InvalidSpecError(f"{freq} Hz does not complete whole cycles in a {WINDOW_S} s window")


def gate_mask(duty: float, sample_rate: int = MODEL_SAMPLE_RATE) -> np.ndarray:
    """Per-sample on/off gate in window-aligned blocks"""
    _check_duty(duty)
    win = int(round(WINDOW_S * sample_rate))
    n_windows = int(round(MODEL_CLIP_SECONDS / WINDOW_S))
    period = int(round(BLOCK_WINDOWS / duty))
    on_windows = np.array([(w % period) < BLOCK_WINDOWS for w in range(n_windows)])
    return np.repeat(on_windows, win)


def realized_duty(duty: float, sample_rate: int = MODEL_SAMPLE_RATE) -> float:
    """Fraction of windows actually gated on for a requested duty"""
    return float(gate_mask(duty, sample_rate).mean())


def gated_tone_call(
    duty: float = 0.5,
    freq: float = CALL_TONE_HZ,
    phase: float = 0.0,
    sample_rate: int = MODEL_SAMPLE_RATE,
) -> AudioClip:
    """Unit-amplitude tone gated on in window-aligned blocks"""
    _check_tone(freq, sample_rate)
    mask = gate_mask(duty, sample_rate)
    t = np.arange(mask.size) / sample_rate
    return AudioClip(mask * np.sin(2 * np.pi * freq * t + phase), sample_rate)


def steady_tone_noise(
    freq: float = NOISE_TONE_HZ, phase: float = 0.0, sample_rate: int = MODEL_SAMPLE_RATE
) -> AudioClip:
    """Unit-amplitude tone over the whole clip"""
    _check_tone(freq, sample_rate)
    n = int(round(MODEL_CLIP_SECONDS * sample_rate))
    t = np.arange(n) / sample_rate
    return AudioClip(np.sin(2 * np.pi * freq * t + phase), sample_rate)


def predicted_emergence_db(snr_db: float, duty: float) -> float:
    """L5 - L95 of the mixture at band-level SNR snr_db"""
    _check_duty(duty)
    return 10.0 * math.log10(1.0 + 10.0 ** (snr_db / 10.0) / duty)


def predicted_crossing_snr(threshold_db: float, duty: float) -> float:
    """SNR at which the emergence reaches threshold_db"""
    _check_duty(duty)
    if not threshold_db > 0:
        raise InvalidSpecError(f"threshold must be > 0 dB, got {threshold_db}")
    return 10.0 * math.log10(duty * (10.0 ** (threshold_db / 10.0) - 1.0))


def analytic_pools(
    duty: float = 0.5, n: int = 4, sample_rate: int = MODEL_SAMPLE_RATE
) -> Dict[str, Dict[str, AudioClip]]:
    """
    Call and noise pools of the family

    Members differ only by phase, so every pair has the same emergence curve.
    """
    phases = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
    return {
        "calls": {
            f"gated{i:02d}": gated_tone_call(duty, phase=float(p), sample_rate=sample_rate)
            for i, p in enumerate(phases)
        },
        "noises": {
            f"tone{i:02d}": steady_tone_noise(phase=float(p), sample_rate=sample_rate)
            for i, p in enumerate(phases)
        },
    }
