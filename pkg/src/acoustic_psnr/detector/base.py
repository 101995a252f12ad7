"""
Detector abstraction shared by the CNN, the energy detector and test doubles
"""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Sequence

from ..dsp import AudioClip
from ..evaluation.ml_metrics import DECISION_THRESHOLD


@dataclass(frozen=True)
class Score:
    """Detection probability and the thresholded decision (strictly > 0.5)"""

    probability: float

    @property
    def decision(self) -> bool:
        return self.probability > DECISION_THRESHOLD


class Detector(ABC):
    """Anything that turns an audio clip into a detection Score"""

    name: str = "detector"

    @abstractmethod
    def score(self, clip: AudioClip) -> Score:
        """Score one clip"""

    def score_many(self, clips: Sequence[AudioClip]) -> List[Score]:
        return [self.score(clip) for clip in clips]

    def describe(self) -> dict:
        return {"name": self.name}


class ConstantDetector(Detector):
    """Returns the same probability for every clip"""

    name = "constant"

    def __init__(self, probability: float = 1.0):
        self.probability = float(probability)

    def score(self, clip: AudioClip) -> Score:
        return Score(self.probability)

    def describe(self) -> dict:
        return {"name": self.name, "probability": self.probability}
