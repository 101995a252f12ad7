"""
DSP Front-End
Resampling, peak normalisation, 40-band Slaney mel spectrogram and the
band / fractile level measurements shared by the mixer and the gate
"""

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Tuple

import librosa
import numpy as np
from numpy.lib.stride_tricks import sliding_window_view
from scipy import signal

from ..exceptions import (
    BandError,
    ClipTooShortError,
    SilentClipError,
    UnsupportedResampleError,
    UsageError,
)
from .audio import MODEL_CLIP_SAMPLES, MODEL_SAMPLE_RATE, AudioClip

# Spectrogram framing: 0.016 s window, hop of 15% of the window
FRAME_LENGTH = 128
FRAME_HOP = 19
N_MELS = 40
MEL_FMIN = 400.0
MEL_FMAX = 4000.0
MEL_DB_FLOOR = -100.0

# Band used for SNR, gate and fractile measurements
CALL_BAND: Tuple[float, float] = (400.0, 4000.0)
LEVEL_FLOOR_DB = -200.0

# Resampler: passband to 87.5% of the target Nyquist, 80 dB stopband
_RESAMPLE_PASS_FRACTION = 0.875
_RESAMPLE_ATTENUATION_DB = 80.0

MIN_FRACTILE_WINDOWS = 20


@dataclass(frozen=True)
class MelSpectrogram:
    """Log-mel matrix [40 bands x T frames] in dB re 1"""

    values: np.ndarray
    band_edges: np.ndarray  # (40, 3): lower, centre, upper frequency in Hz
    frame_hop_s: float

    @property
    def n_bands(self) -> int:
        return self.values.shape[0]

    @property
    def n_frames(self) -> int:
        return self.values.shape[1]


@dataclass(frozen=True)
class FractileLevels:
    """Short-window levels exceeded 5% (l5) and 95% (l95) of the time"""

    l5: float
    l95: float
    window_s: float

    @property
    def emergence(self) -> float:
        return self.l5 - self.l95


# ---------------------------------------------------------------------------
# Resampling / normalisation
# ---------------------------------------------------------------------------


@lru_cache(maxsize=16)
def _antialias_taps(source_rate: int, target_rate: int, up: int) -> np.ndarray:
    """Kaiser-windowed sinc lowpass designed at the upsampled rate"""
    upsampled_rate = source_rate * up
    nyquist = target_rate / 2.0
    pass_edge = _RESAMPLE_PASS_FRACTION * nyquist
    width = nyquist - pass_edge
    numtaps, beta = signal.kaiserord(_RESAMPLE_ATTENUATION_DB, width / (upsampled_rate / 2.0))
    numtaps |= 1
    return signal.firwin(
        numtaps,
        (pass_edge + nyquist) / 2.0,
        window=("kaiser", beta),
        fs=upsampled_rate,
    )


def resample(clip: AudioClip, target_rate: int = MODEL_SAMPLE_RATE) -> AudioClip:
    """
    Downsample a clip with a polyphase windowed-sinc filter

    Args:
        clip: input clip
        target_rate: output sample rate in Hz (must not exceed the input rate)

    Returns:
        Resampled clip; the input itself when rates already match
    """
    if target_rate <= 0:
        raise UsageError(f"Target rate must be positive, got {target_rate}")
    clip.require_non_empty()
    if clip.sample_rate < target_rate:
        raise UnsupportedResampleError(
            f"Upsampling {clip.sample_rate} Hz -> {target_rate} Hz is not supported"
        )
    if clip.sample_rate == target_rate:
        return clip

    g = math.gcd(clip.sample_rate, int(target_rate))
    up, down = int(target_rate) // g, clip.sample_rate // g
    taps = _antialias_taps(clip.sample_rate, int(target_rate), up)
    samples = signal.resample_poly(clip.samples, up, down, window=taps)
    return AudioClip(samples, int(target_rate))


def normalize(clip: AudioClip) -> AudioClip:
    """Pure gain so that the peak absolute amplitude is exactly 1"""
    clip.require_non_empty()
    peak = float(np.max(np.abs(clip.samples)))
    if peak == 0.0:
        raise SilentClipError("Cannot normalise an all-zero clip")
    return AudioClip(clip.samples / peak, clip.sample_rate)


# ---------------------------------------------------------------------------
# Mel spectrogram
# ---------------------------------------------------------------------------


@lru_cache(maxsize=1)
def _mel_filterbank() -> Tuple[np.ndarray, np.ndarray]:
    """
    Slaney-scale triangles with unit peaks

    Neighbouring triangles sum to one across the band, so mel-band powers
    add up to the band power.
    """
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        weights = librosa.filters.mel(
            sr=MODEL_SAMPLE_RATE,
            n_fft=FRAME_LENGTH,
            n_mels=N_MELS,
            fmin=MEL_FMIN,
            fmax=MEL_FMAX,
            htk=False,
            norm=None,
            dtype=np.float64,
        )
    points = librosa.mel_frequencies(n_mels=N_MELS + 2, fmin=MEL_FMIN, fmax=MEL_FMAX, htk=False)
    edges = np.stack([points[:-2], points[1:-1], points[2:]], axis=1)
    weights.setflags(write=False)
    edges.setflags(write=False)
    return weights, edges


@lru_cache(maxsize=1)
def _analysis_window() -> np.ndarray:
    window = signal.get_window("blackmanharris", FRAME_LENGTH, fftbins=True)
    window.setflags(write=False)
    return window


def mel_band_edges() -> np.ndarray:
    """(40, 3) array of lower / centre / upper band frequencies in Hz"""
    return _mel_filterbank()[1]


def frame_count(n_samples: int) -> int:
    """Number of frames produced for n_samples (final partial frame zero-padded)"""
    if n_samples < FRAME_LENGTH:
        raise ClipTooShortError(
            f"Clip of {n_samples} samples is shorter than one {FRAME_LENGTH}-sample window"
        )
    return 1 + math.ceil((n_samples - FRAME_LENGTH) / FRAME_HOP)


def mel_spectrogram(clip: AudioClip) -> MelSpectrogram:
    """
    40-band log-mel spectrogram of an 8 kHz clip

    Blackman-Harris window of 128 samples, hop 19 samples, one-sided power
    spectrum scaled so bins sum to the mean-square, dB re 1 floored at -100.
    """
    if clip.sample_rate != MODEL_SAMPLE_RATE:
        raise UsageError(
            f"mel_spectrogram expects {MODEL_SAMPLE_RATE} Hz input, got {clip.sample_rate} Hz"
        )
    n_frames = frame_count(len(clip))

    padded = np.zeros((n_frames - 1) * FRAME_HOP + FRAME_LENGTH)
    padded[: len(clip)] = clip.samples
    frames = sliding_window_view(padded, FRAME_LENGTH)[::FRAME_HOP]

    window = _analysis_window()
    spectrum = np.fft.rfft(frames * window, axis=1)
    power = np.abs(spectrum) ** 2 / (FRAME_LENGTH * np.sum(window**2))
    power[:, 1:-1] *= 2.0

    weights, edges = _mel_filterbank()
    mel_power = weights @ power.T
    floor = 10.0 ** (MEL_DB_FLOOR / 10.0)
    values = 10.0 * np.log10(np.maximum(mel_power, floor))
    return MelSpectrogram(values=values, band_edges=edges, frame_hop_s=FRAME_HOP / MODEL_SAMPLE_RATE)


def prepare_model_input(clip: AudioClip) -> MelSpectrogram:
    """Detector preprocessing chain: 8 kHz, 0.66 s, peak 1, log-mel"""
    clip = resample(clip, MODEL_SAMPLE_RATE)
    clip = clip.fit_length(MODEL_CLIP_SAMPLES)
    return mel_spectrogram(normalize(clip))


# ---------------------------------------------------------------------------
# Band and fractile levels
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def band_filter(lo: float, hi: float, sample_rate: int) -> np.ndarray:
    """
    6th-order Butterworth section cascade for the [lo, hi] band

    A band whose upper edge sits on Nyquist degenerates to a highpass at lo.
    """
    nyquist = sample_rate / 2.0
    if not (0.0 < lo < hi <= nyquist):
        raise BandError(f"Invalid band [{lo}, {hi}] Hz for sample rate {sample_rate} Hz")
    if hi >= nyquist:
        sos = signal.butter(6, lo, btype="highpass", fs=sample_rate, output="sos")
    else:
        sos = signal.butter(3, [lo, hi], btype="bandpass", fs=sample_rate, output="sos")
    sos.setflags(write=False)
    return sos


def bandpass(clip: AudioClip, lo: float, hi: float) -> np.ndarray:
    """Zero-phase (forward-backward) band filtering, effective order 12"""
    sos = band_filter(float(lo), float(hi), clip.sample_rate)
    padlen = 3 * (2 * len(sos) + 1)
    if len(clip) <= padlen:
        raise ClipTooShortError(
            f"Clip of {len(clip)} samples is shorter than the filter warm-up ({padlen + 1})"
        )
    # scipy's sosfilt kernel needs a writable buffer; the cached sos stays frozen
    return signal.sosfiltfilt(np.array(sos), clip.samples, padlen=padlen)


def amplitude_to_db(rms) -> np.ndarray:
    floor = 10.0 ** (LEVEL_FLOOR_DB / 20.0)
    return 20.0 * np.log10(np.maximum(rms, floor))


def band_level(clip: AudioClip, lo: float = CALL_BAND[0], hi: float = CALL_BAND[1]) -> float:
    """20*log10 of the RMS of the zero-phase band-filtered clip"""
    filtered = bandpass(clip, lo, hi)
    return float(amplitude_to_db(np.sqrt(np.mean(filtered**2))))


def window_levels(
    clip: AudioClip, window_s: float = 0.01, lo: float = CALL_BAND[0], hi: float = CALL_BAND[1]
) -> np.ndarray:
    """Per-window RMS levels (dB) over consecutive non-overlapping windows"""
    win = int(round(window_s * clip.sample_rate))
    if win < 1:
        raise UsageError(f"Window of {window_s} s is shorter than one sample")
    n_windows = len(clip) // win
    if n_windows < MIN_FRACTILE_WINDOWS:
        raise ClipTooShortError(
            f"Only {n_windows} windows of {window_s} s; at least {MIN_FRACTILE_WINDOWS} required"
        )
    filtered = bandpass(clip, lo, hi)
    frames = filtered[: n_windows * win].reshape(n_windows, win)
    return amplitude_to_db(np.sqrt(np.mean(frames**2, axis=1)))


def fractile_levels(
    clip: AudioClip, window_s: float = 0.01, lo: float = CALL_BAND[0], hi: float = CALL_BAND[1]
) -> FractileLevels:
    """L5 / L95 fractile levels with linear interpolation between order statistics"""
    levels = window_levels(clip, window_s, lo, hi)
    return FractileLevels(
        l5=float(np.percentile(levels, 95)),
        l95=float(np.percentile(levels, 5)),
        window_s=window_s,
    )
