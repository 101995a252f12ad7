"""
Audio clip container and WAV file I/O
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import soundfile as sf
from loguru import logger

from ..exceptions import DataError, EmptyClipError

MODEL_SAMPLE_RATE = 8000
MODEL_CLIP_SECONDS = 0.66
MODEL_CLIP_SAMPLES = int(round(MODEL_SAMPLE_RATE * MODEL_CLIP_SECONDS))  # 5280


@dataclass(frozen=True)
class AudioClip:
    """Mono sample buffer plus its sample rate (Hz)"""

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.ndim != 1:
            raise DataError(f"AudioClip expects mono samples, got shape {samples.shape}")
        if int(self.sample_rate) <= 0:
            raise DataError(f"Sample rate must be positive, got {self.sample_rate}")
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        """Duration in seconds"""
        return self.samples.size / self.sample_rate

    def require_non_empty(self) -> "AudioClip":
        if self.samples.size == 0:
            raise EmptyClipError("Audio clip is empty")
        return self

    def scaled(self, gain: float) -> "AudioClip":
        return AudioClip(self.samples * gain, self.sample_rate)

    def fit_length(self, n_samples: int) -> "AudioClip":
        """Cut or zero-pad at the end to exactly n_samples"""
        if self.samples.size >= n_samples:
            return AudioClip(self.samples[:n_samples], self.sample_rate)
        padded = np.zeros(n_samples)
        padded[: self.samples.size] = self.samples
        return AudioClip(padded, self.sample_rate)


def read_wav(path: Union[str, Path]) -> AudioClip:
    """
    Read a WAV file (PCM 16-bit or 32-bit float)

    Multichannel files keep their first channel. Integer PCM maps to [-1, 1).
    """
    path = Path(path)
    try:
        data, sample_rate = sf.read(str(path), dtype="float64", always_2d=True)
    except RuntimeError as e:
        raise DataError(f"Cannot read WAV file {path}: {e}") from e

    if data.shape[1] > 1:
        logger.debug(f"{path.name}: {data.shape[1]} channels, keeping the first")
    return AudioClip(data[:, 0], sample_rate)


def write_wav(path: Union[str, Path], clip: AudioClip, subtype: str = "FLOAT") -> Path:
    """Write a clip as a mono WAV file (32-bit float by default, lossless)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    sf.write(str(path), clip.samples, clip.sample_rate, subtype=subtype)
    return path
