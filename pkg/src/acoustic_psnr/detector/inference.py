"""
CNN inference on log-mel spectrograms and audio clips
"""

from typing import List, Sequence

import numpy as np

from ..dsp import AudioClip, MelSpectrogram, prepare_model_input
from .base import Detector, Score
from .cnn import forward, sigmoid
from .model import DetectorModel


def stack_spectrograms(specs: Sequence[MelSpectrogram]) -> np.ndarray:
    """(N, 1, 40, T) batch from spectrograms of equal frame count"""
    return np.stack([spec.values for spec in specs])[:, None, :, :]


def infer_batch(model: DetectorModel, batch: np.ndarray) -> np.ndarray:
    """Probabilities for a (N, 1, 40, T) batch, dropout disabled"""
    logits, _ = forward(model.params, batch, training=False)
    return sigmoid(logits)


def infer(model: DetectorModel, spec: MelSpectrogram) -> Score:
    """Deterministic single-spectrogram inference"""
    probability = infer_batch(model, stack_spectrograms([spec]))[0]
    return Score(float(probability))


class CnnDetector(Detector):
    """Weights-backed detector; the model is read-only and shareable across threads"""

    name = "cnn"

    def __init__(self, model: DetectorModel, batch_size: int = 64):
        self.model = model
        self.batch_size = batch_size

    def score(self, clip: AudioClip) -> Score:
        return infer(self.model, prepare_model_input(clip))

    def score_many(self, clips: Sequence[AudioClip]) -> List[Score]:
        scores: List[Score] = []
        for start in range(0, len(clips), self.batch_size):
            specs = [prepare_model_input(clip) for clip in clips[start : start + self.batch_size]]
            probabilities = infer_batch(self.model, stack_spectrograms(specs))
            scores.extend(Score(float(p)) for p in probabilities)
        return scores

    def describe(self) -> dict:
        return {"name": self.name, "n_parameters": self.model.n_parameters}
