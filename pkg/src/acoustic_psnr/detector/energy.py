"""
Energy (emergence) detector

Scores a clip by how far its L5 - L95 fractile emergence in the call band
exceeds a threshold. Fully deterministic, which makes it an analytically
predictable reference for the p(snr) pipeline.
"""

from scipy.special import expit

from ..dsp import CALL_BAND, AudioClip, fractile_levels
from .base import Detector, Score


class EnergyDetector(Detector):
    """probability = logistic(emergence_dB - threshold_dB)"""

    name = "energy"

    def __init__(self, threshold_db: float = 10.0, window_s: float = 0.01):
        self.threshold_db = float(threshold_db)
        self.window_s = window_s

    def emergence(self, clip: AudioClip) -> float:
        return fractile_levels(clip, self.window_s, *CALL_BAND).emergence

    def score(self, clip: AudioClip) -> Score:
        return Score(float(expit(self.emergence(clip) - self.threshold_db)))

    def describe(self) -> dict:
        return {"name": self.name, "threshold_db": self.threshold_db}


def energy_detector(threshold_db: float = 10.0) -> EnergyDetector:
    return EnergyDetector(threshold_db)
