"""
Synthetic Stimuli
Pulsed frequency-swept calls and three background-noise families
(impulsive rain, stationary wind, tonal biophony), all seeded
"""

from typing import Dict, Literal, Optional, Sequence, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..dsp import (
    CALL_BAND,
    MODEL_CLIP_SECONDS,
    MODEL_SAMPLE_RATE,
    AudioClip,
    band_level,
    bandpass,
    normalize,
)
from ..exceptions import InvalidSpecError

NoiseKind = Literal["rain", "wind", "biophony"]
NOISE_KINDS: Tuple[str, ...] = ("rain", "wind", "biophony")

# Band holding the biophony bed and bursts
BIOPHONY_BAND = (1000.0, 3900.0)


class CallSpec(BaseModel):
    """Pulsed call: pulse_count swept tone pulses separated by silent gaps"""

    model_config = ConfigDict(frozen=True)

    pulse_count: int = Field(5, ge=1)
    pulse_duration_s: float = Field(0.04, gt=0)
    inter_pulse_s: float = Field(0.06, gt=0.01)
    onset_s: float = Field(0.02, ge=0)
    f_start: float = Field(1800.0, ge=CALL_BAND[0], le=CALL_BAND[1])
    f_end: float = Field(1200.0, ge=CALL_BAND[0], le=CALL_BAND[1])
    attack: float = Field(0.2, ge=0, le=1)
    decay: float = Field(0.3, ge=0, le=1)
    harmonic_level: float = Field(0.25, ge=0, le=1)
    pitch_jitter: float = Field(0.03, ge=0, lt=0.5)
    seed: int = 0

    @model_validator(mode="after")
    def _check_layout(self) -> "CallSpec":
        if self.attack + self.decay > 1.0:
            raise ValueError("attack + decay must not exceed 1")
        if self.total_duration_s > MODEL_CLIP_SECONDS + 1e-9:
            raise ValueError(
                f"Call lasts {self.total_duration_s:.3f} s, longer than {MODEL_CLIP_SECONDS} s"
            )
        return self

    @property
    def total_duration_s(self) -> float:
        return (
            self.onset_s
            + self.pulse_count * self.pulse_duration_s
            + (self.pulse_count - 1) * self.inter_pulse_s
        )


class NoiseSpec(BaseModel):
    """
    Background noise

    rain: Poisson clicks at rate_hz over a bed bed_level_db below them.
    wind: stationary Gaussian noise, flat below corner_hz then -6 dB/octave.
    biophony: 2-5 FM tone bursts in 1-4 kHz over a bed bed_level_db below
    a unit tone.
    The result is scaled so its 400-4000 Hz band level is 20*log10(intensity).
    """

    model_config = ConfigDict(frozen=True)

    kind: NoiseKind = "wind"
    intensity: float = Field(1.0, gt=0)
    rate_hz: float = Field(100.0, gt=0, le=2000)
    click_ms: float = Field(3.0, gt=0, le=20)
    corner_hz: float = Field(1000.0, ge=100, le=3900)
    min_bursts: int = Field(2, ge=1)
    max_bursts: int = Field(5, ge=1)
    bed_level_db: Optional[float] = Field(None, le=0)
    seed: int = 0

    @model_validator(mode="after")
    def _check_bursts(self) -> "NoiseSpec":
        if self.min_bursts > self.max_bursts:
            raise ValueError("min_bursts must not exceed max_bursts")
        return self

    @property
    def bed_db(self) -> float:
        if self.bed_level_db is not None:
            return self.bed_level_db
        return {"rain": -30.0, "wind": 0.0, "biophony": -10.0}[self.kind]


def _ramps(n: int, attack: float, decay: float) -> np.ndarray:
    """Raised-cosine attack / decay envelope over n samples"""
    env = np.ones(n)
    n_attack = int(round(attack * n))
    n_decay = int(round(decay * n))
    if n_attack:
        env[:n_attack] = 0.5 - 0.5 * np.cos(np.pi * np.arange(n_attack) / n_attack)
    if n_decay:
        env[n - n_decay :] = 0.5 + 0.5 * np.cos(np.pi * (np.arange(n_decay) + 1) / n_decay)
    return env


def gen_call(spec: Optional[CallSpec] = None, sample_rate: int = MODEL_SAMPLE_RATE) -> AudioClip:
    """
    Render a pulsed call as a 0.66 s peak-normalised clip

    Each pulse is a linear sweep from f_start to f_end (pitch jittered per
    pulse) with an optional second harmonic kept only while it stays in band.
    """
    spec = spec or CallSpec()
    rng = np.random.default_rng(spec.seed)
    n_total = int(round(MODEL_CLIP_SECONDS * sample_rate))
    samples = np.zeros(n_total)

    n_pulse = int(round(spec.pulse_duration_s * sample_rate))
    step = int(round((spec.pulse_duration_s + spec.inter_pulse_s) * sample_rate))
    start = int(round(spec.onset_s * sample_rate))
    t = np.arange(n_pulse) / sample_rate
    env = _ramps(n_pulse, spec.attack, spec.decay)

    for _ in range(spec.pulse_count):
        scale = 1.0 + spec.pitch_jitter * rng.uniform(-1.0, 1.0)
        f0, f1 = spec.f_start * scale, spec.f_end * scale
        phase = 2 * np.pi * (f0 * t + (f1 - f0) * t**2 / (2 * spec.pulse_duration_s))
        phase += rng.uniform(0, 2 * np.pi)
        pulse = np.sin(phase)
        if spec.harmonic_level > 0 and 2 * max(f0, f1) < CALL_BAND[1] * 0.95:
            pulse += spec.harmonic_level * np.sin(2 * phase)
        end = min(start + n_pulse, n_total)
        samples[start:end] += (env * pulse)[: end - start]
        start += step

    return normalize(AudioClip(samples, sample_rate))


def _white(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n)


def _rain(spec: NoiseSpec, rng: np.random.Generator, n: int, sample_rate: int) -> np.ndarray:
    samples = np.zeros(n)
    n_clicks = rng.poisson(spec.rate_hz * n / sample_rate)
    click_len = max(2, int(round(spec.click_ms * 1e-3 * sample_rate)))
    decay = np.exp(-np.arange(click_len) / (click_len / 4.0))
    for position in rng.integers(0, n, size=n_clicks):
        amplitude = rng.uniform(0.3, 1.0)
        click = amplitude * decay * rng.standard_normal(click_len)
        end = min(position + click_len, n)
        samples[position:end] += click[: end - position]
    click_rms = np.sqrt(np.mean(samples**2)) if n_clicks else 1.0
    bed = _white(rng, n) * click_rms * 10.0 ** (spec.bed_db / 20.0)
    return samples + bed


def _wind(spec: NoiseSpec, rng: np.random.Generator, n: int, sample_rate: int) -> np.ndarray:
    spectrum = np.fft.rfft(_white(rng, n))
    freqs = np.fft.rfftfreq(n, 1.0 / sample_rate)
    tilt = np.where(freqs > spec.corner_hz, spec.corner_hz / np.maximum(freqs, 1e-9), 1.0)
    return np.fft.irfft(spectrum * tilt, n)


def _biophony(spec: NoiseSpec, rng: np.random.Generator, n: int, sample_rate: int) -> np.ndarray:
    bed = bandpass(AudioClip(_white(rng, n), sample_rate), *BIOPHONY_BAND)
    bed *= (10.0 ** (spec.bed_db / 20.0) / np.sqrt(2.0)) / np.sqrt(np.mean(bed**2))

    samples = bed
    for _ in range(int(rng.integers(spec.min_bursts, spec.max_bursts + 1))):
        duration = rng.uniform(0.15, 0.5)
        m = min(n, int(round(duration * sample_rate)))
        start = int(rng.integers(0, n - m + 1))
        t = np.arange(m) / sample_rate
        centre = rng.uniform(1200.0, 3800.0)
        depth = rng.uniform(20.0, 100.0)
        rate = rng.uniform(5.0, 15.0)
        phase = 2 * np.pi * centre * t - depth / rate * np.cos(2 * np.pi * rate * t)
        burst = rng.uniform(0.5, 1.0) * _ramps(m, 0.1, 0.1) * np.sin(phase + rng.uniform(0, 2 * np.pi))
        samples[start : start + m] += burst
    return samples


_GENERATORS = {"rain": _rain, "wind": _wind, "biophony": _biophony}


def gen_noise(
    spec: Optional[NoiseSpec] = None,
    duration_s: float = MODEL_CLIP_SECONDS,
    sample_rate: int = MODEL_SAMPLE_RATE,
) -> AudioClip:
    """
    Render a background-noise clip calibrated to its intensity

    Args:
        spec: noise family and parameters
        duration_s: clip duration, at least 0.66 s
        sample_rate: output rate in Hz

    Returns:
        AudioClip whose 400-4000 Hz band level equals 20*log10(spec.intensity)
    """
    spec = spec or NoiseSpec()
    if duration_s < MODEL_CLIP_SECONDS - 1e-9:
        raise InvalidSpecError(f"Noise duration must be >= {MODEL_CLIP_SECONDS} s, got {duration_s}")
    n = int(round(duration_s * sample_rate))
    rng = np.random.default_rng(spec.seed)
    raw = AudioClip(_GENERATORS[spec.kind](spec, rng, n, sample_rate), sample_rate)

    # Calibration pass: band level -> 20 log10(intensity)
    target = 20.0 * np.log10(spec.intensity)
    gain_db = target - band_level(raw, *CALL_BAND)
    return raw.scaled(10.0 ** (gain_db / 20.0))


# ---------------------------------------------------------------------------
# Random specs and clip pools
# ---------------------------------------------------------------------------


def random_call_spec(rng: np.random.Generator, seed: int) -> CallSpec:
    """Draw a call spec whose pulses always fit in the clip"""
    pulse_count = int(rng.integers(3, 7))
    pulse_duration = float(rng.uniform(0.03, 0.06))
    onset = float(rng.uniform(0.01, 0.05))
    room = MODEL_CLIP_SECONDS - onset - pulse_count * pulse_duration
    max_gap = min(0.08, room / (pulse_count - 1))
    f_start = float(rng.uniform(1000.0, 2500.0))
    return CallSpec(
        pulse_count=pulse_count,
        pulse_duration_s=pulse_duration,
        inter_pulse_s=float(rng.uniform(0.025, max_gap)),
        onset_s=onset,
        f_start=f_start,
        f_end=f_start * float(rng.uniform(0.6, 1.0)),
        seed=seed,
    )


def random_noise_spec(rng: np.random.Generator, kind: str, seed: int) -> NoiseSpec:
    kw: Dict = {"kind": kind, "seed": seed}
    if kind == "rain":
        kw["rate_hz"] = float(rng.uniform(60.0, 200.0))
    elif kind == "wind":
        kw["corner_hz"] = float(rng.uniform(700.0, 1400.0))
    return NoiseSpec(**kw)


def call_pool(n: int, seed: int = 0) -> Dict[str, AudioClip]:
    """n clean calls keyed call0000, call0001, ..."""
    pool = {}
    for i in range(n):
        rng = np.random.default_rng([seed, 1, i])
        pool[f"call{i:04d}"] = gen_call(random_call_spec(rng, seed=int(rng.integers(2**31))))
    logger.info(f"🐦 Generated {n} calls")
    return pool


def noise_pool(n: int, kinds: Sequence[str] = NOISE_KINDS, seed: int = 0) -> Dict[str, AudioClip]:
    """n noises cycling through kinds, keyed <kind>0000, ..."""
    pool = {}
    for i in range(n):
        kind = kinds[i % len(kinds)]
        rng = np.random.default_rng([seed, 2, i])
        pool[f"{kind}{i:04d}"] = gen_noise(random_noise_spec(rng, kind, seed=int(rng.integers(2**31))))
    logger.info(f"🌧️ Generated {n} noises ({', '.join(kinds)})")
    return pool
