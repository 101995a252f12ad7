"""
DSP front-end: audio clips, WAV I/O, resampling, log-mel features and
band / fractile level measurements
"""

from .audio import (
    MODEL_CLIP_SAMPLES,
    MODEL_CLIP_SECONDS,
    MODEL_SAMPLE_RATE,
    AudioClip,
    read_wav,
    write_wav,
)
from .frontend import (
    CALL_BAND,
    FractileLevels,
    MelSpectrogram,
    band_level,
    bandpass,
    fractile_levels,
    mel_band_edges,
    mel_spectrogram,
    normalize,
    prepare_model_input,
    resample,
    window_levels,
)

__all__ = [
    "MODEL_CLIP_SAMPLES",
    "MODEL_CLIP_SECONDS",
    "MODEL_SAMPLE_RATE",
    "AudioClip",
    "read_wav",
    "write_wav",
    "CALL_BAND",
    "FractileLevels",
    "MelSpectrogram",
    "band_level",
    "bandpass",
    "fractile_levels",
    "mel_band_edges",
    "mel_spectrogram",
    "normalize",
    "prepare_model_input",
    "resample",
    "window_levels",
]
