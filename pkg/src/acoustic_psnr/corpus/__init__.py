"""
Synthetic corpus

Generators for pulsed calls and rain / wind / biophony backgrounds, the
analytic gated-tone family used to check the evaluation pipeline, dataset
assembly with session-disjoint splits, and the targeted SNR augmentation.
"""

from .analytic import (
    analytic_pools,
    gated_tone_call,
    predicted_crossing_snr,
    predicted_emergence_db,
    realized_duty,
    steady_tone_noise,
)
from .augmentation import (
    AUGM_MODES,
    TRAINING_CONFIGURATIONS,
    TrainingConfiguration,
    build_train_augm,
    select_augm_range_from_curve,
)
from .dataset import (
    SPLITS,
    LabeledClip,
    LabeledDataset,
    build_experiment_datasets,
    load_dataset,
    save_dataset,
)
from .synth import (
    NOISE_KINDS,
    CallSpec,
    NoiseSpec,
    call_pool,
    gen_call,
    gen_noise,
    noise_pool,
)

__all__ = [
    "analytic_pools",
    "gated_tone_call",
    "predicted_crossing_snr",
    "predicted_emergence_db",
    "realized_duty",
    "steady_tone_noise",
    "AUGM_MODES",
    "TRAINING_CONFIGURATIONS",
    "TrainingConfiguration",
    "build_train_augm",
    "select_augm_range_from_curve",
    "SPLITS",
    "LabeledClip",
    "LabeledDataset",
    "build_experiment_datasets",
    "load_dataset",
    "save_dataset",
    "NOISE_KINDS",
    "CallSpec",
    "NoiseSpec",
    "call_pool",
    "gen_call",
    "gen_noise",
    "noise_pool",
]
