"""
SNR-controlled mixing: emergence gate, call/noise superposition and the
p(snr) evaluation grid
"""

from .mixer import (
    SILENCE_LEVEL_DB,
    ClipSet,
    EvalGrid,
    GateCriterion,
    GridTrial,
    MixResult,
    MixSpec,
    build_eval_grid,
    materialize_grid,
    mix_at_snr,
    passes_gate,
    snr_bins,
)

__all__ = [
    "SILENCE_LEVEL_DB",
    "ClipSet",
    "EvalGrid",
    "GateCriterion",
    "GridTrial",
    "MixResult",
    "MixSpec",
    "build_eval_grid",
    "materialize_grid",
    "mix_at_snr",
    "passes_gate",
    "snr_bins",
]
