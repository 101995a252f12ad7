"""
Shared fixtures: deterministic test signals
"""

import numpy as np
import pytest

from acoustic_psnr.dsp import MODEL_CLIP_SAMPLES, MODEL_SAMPLE_RATE, AudioClip


def sine(freq: float, n: int = MODEL_CLIP_SAMPLES, sample_rate: int = MODEL_SAMPLE_RATE, amplitude: float = 1.0) -> AudioClip:
    t = np.arange(n) / sample_rate
    return AudioClip(amplitude * np.sin(2 * np.pi * freq * t), sample_rate)


def pulse_train(
    on_s: float = 0.02,
    off_s: float = 0.08,
    off_gain: float = 1e-3,
    freq: float = 2000.0,
    n: int = MODEL_CLIP_SAMPLES,
    sample_rate: int = MODEL_SAMPLE_RATE,
) -> AudioClip:
    """Tone bursts of on_s seconds separated by off_s gaps at off_gain"""
    t = np.arange(n) / sample_rate
    period = on_s + off_s
    envelope = np.where((t % period) < on_s, 1.0, off_gain)
    return AudioClip(envelope * np.sin(2 * np.pi * freq * t), sample_rate)


def white_noise(seed: int = 0, n: int = MODEL_CLIP_SAMPLES, rms: float = 1.0) -> AudioClip:
    rng = np.random.default_rng(seed)
    return AudioClip(rms * rng.standard_normal(n), MODEL_SAMPLE_RATE)


@pytest.fixture
def make_sine():
    return sine


@pytest.fixture
def make_pulse_train():
    return pulse_train


@pytest.fixture
def make_noise():
    return white_noise


@pytest.fixture
def tone_1k():
    return sine(1000.0)


@pytest.fixture
def noise_clip():
    return white_noise(seed=42)
