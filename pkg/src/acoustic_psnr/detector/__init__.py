"""
Detectors

This package provides the fixed CNN detector (numpy forward/backward passes,
Adam training, binary weight format), the emergence-based energy detector
used as a reference for the evaluation pipeline, and the Detector abstraction
that the psychometric measurement works against.

Modules:
- base: Score, Detector, ConstantDetector
- model: architecture, DetectorModel, weight file codec
- cnn: layer primitives and network passes
- inference: infer / CnnDetector
- training: TrainConfig, train, gradient_check
- energy: EnergyDetector
"""

from .base import DECISION_THRESHOLD, ConstantDetector, Detector, Score
from .cnn import layer_shapes, min_input_frames
from .energy import EnergyDetector, energy_detector
from .inference import CnnDetector, infer, infer_batch, stack_spectrograms
from .model import (
    ARCHITECTURE,
    DetectorModel,
    count_parameters,
    init_model,
    load_weights,
    parameter_shapes,
    save_weights,
)
from .training import (
    TrainConfig,
    TrainingResult,
    featurize,
    gradient_check,
    loss_and_gradients,
    train,
    train_on_features,
)

__all__ = [
    "DECISION_THRESHOLD",
    "ConstantDetector",
    "Detector",
    "Score",
    "layer_shapes",
    "min_input_frames",
    "EnergyDetector",
    "energy_detector",
    "CnnDetector",
    "infer",
    "infer_batch",
    "stack_spectrograms",
    "ARCHITECTURE",
    "DetectorModel",
    "count_parameters",
    "init_model",
    "load_weights",
    "parameter_shapes",
    "save_weights",
    "TrainConfig",
    "TrainingResult",
    "featurize",
    "gradient_check",
    "loss_and_gradients",
    "train",
    "train_on_features",
]
