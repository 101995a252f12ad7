"""
Detector Training
Mini-batch Adam on binary cross-entropy, seeded shuffling and dropout,
per-epoch history, and a finite-difference check of the backward pass
"""

from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel, Field

from ..dsp import AudioClip, prepare_model_input
from ..evaluation import evaluate_scores
from ..exceptions import SingleClassDatasetError, TrainingDivergedError, UsageError
from .cnn import CONV_DROPOUT, LINEAR_DROPOUT, backward, bce_with_logits, forward, sigmoid
from .model import DetectorModel, init_model

HISTORY_COLUMNS = ["epoch", "train_loss", "valid_loss", "train_wacc", "valid_wacc"]

GradientHook = Callable[[Dict[str, np.ndarray]], Dict[str, np.ndarray]]


class TrainConfig(BaseModel):
    """Optimisation settings; defaults are the full-scale training protocol"""

    learning_rate: float = Field(1e-5, gt=0, lt=1)
    epochs: int = Field(1000, ge=1)
    batch_size: int = Field(32, ge=1)
    dropout_conv: float = Field(CONV_DROPOUT, gt=0, lt=1)
    dropout_linear: float = Field(LINEAR_DROPOUT, gt=0, lt=1)
    beta1: float = Field(0.9, gt=0, lt=1)
    beta2: float = Field(0.999, gt=0, lt=1)
    epsilon: float = Field(1e-8, gt=0, lt=1)
    seed: int = 0


@dataclass
class TrainingResult:
    """Final-epoch model and the per-epoch history"""

    model: DetectorModel
    history: pd.DataFrame

    @property
    def final_train_loss(self) -> float:
        return float(self.history["train_loss"].iloc[-1])

    def save_history(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        self.history.to_csv(path, index=False, float_format="%.10g")
        return path


class Adam:
    """Adam optimiser over a dict of float64 tensors"""

    def __init__(self, params: Dict[str, np.ndarray], config: TrainConfig):
        self.config = config
        self.m = {name: np.zeros_like(p) for name, p in params.items()}
        self.v = {name: np.zeros_like(p) for name, p in params.items()}
        self.step_count = 0

    def step(self, params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray]) -> None:
        cfg = self.config
        self.step_count += 1
        correction1 = 1.0 - cfg.beta1**self.step_count
        correction2 = 1.0 - cfg.beta2**self.step_count
        # Fixed iteration order keeps updates reproducible
        for name in params:
            g = grads[name]
            self.m[name] = cfg.beta1 * self.m[name] + (1.0 - cfg.beta1) * g
            self.v[name] = cfg.beta2 * self.v[name] + (1.0 - cfg.beta2) * g * g
            m_hat = self.m[name] / correction1
            v_hat = self.v[name] / correction2
            params[name] -= cfg.learning_rate * m_hat / (np.sqrt(v_hat) + cfg.epsilon)


def featurize(clips: Sequence[AudioClip]) -> np.ndarray:
    """(N, 1, 40, T) model-input batch for a list of clips"""
    return np.stack([prepare_model_input(clip).values for clip in clips])[:, None, :, :]


def loss_and_gradients(
    params: Dict[str, np.ndarray], x: np.ndarray, labels: np.ndarray
) -> Tuple[float, Dict[str, np.ndarray]]:
    """Deterministic (dropout off) BCE loss and its gradients"""
    logits, cache = forward(params, x, training=False)
    loss, dlogits = bce_with_logits(logits, labels)
    return loss, backward(params, cache, dlogits)


def _evaluate(
    params: Dict[str, np.ndarray], x: np.ndarray, labels: np.ndarray, batch_size: int
) -> Tuple[float, Optional[float]]:
    probabilities = []
    for start in range(0, len(x), batch_size):
        logits, _ = forward(params, x[start : start + batch_size], training=False)
        probabilities.append(sigmoid(logits))
    scores = np.concatenate(probabilities)
    metrics = evaluate_scores(scores, labels.astype(bool))
    return metrics.loss, metrics.weighted_accuracy


def _check_labels(labels: np.ndarray, what: str) -> None:
    if labels.size == 0:
        raise UsageError(f"{what} set is empty")
    if np.all(labels == labels[0]):
        raise SingleClassDatasetError(
            f"{what} set contains only {'positive' if labels[0] else 'negative'} examples"
        )


def train_on_features(
    x: np.ndarray,
    labels: Sequence[bool],
    config: Optional[TrainConfig] = None,
    valid: Optional[Tuple[np.ndarray, Sequence[bool]]] = None,
    initial: Optional[DetectorModel] = None,
) -> TrainingResult:
    """
    Train the detector on precomputed (N, 1, 40, T) log-mel inputs

    Args:
        x: model-input batch
        labels: True for clips containing the call
        config: optimisation settings (full-scale defaults when omitted)
        valid: optional (inputs, labels) validation set
        initial: starting weights (seeded initialisation when omitted)

    Returns:
        TrainingResult with the final-epoch model and per-epoch history
    """
    config = config or TrainConfig()
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if len(x) != len(y):
        raise UsageError(f"{len(x)} inputs vs {len(y)} labels")
    _check_labels(y, "Training")
    if valid is not None:
        valid_x = np.asarray(valid[0], dtype=np.float64)
        valid_y = np.asarray(valid[1], dtype=np.float64)

    params = (initial or init_model(config.seed)).as_float64()
    optimizer = Adam(params, config)
    rows = []

    logger.info(
        f"🏋️ Training on {len(y)} clips ({int(y.sum())} positive) for {config.epochs} epochs, "
        f"batch {config.batch_size}, lr {config.learning_rate:g}"
    )
    for epoch in range(1, config.epochs + 1):
        order = np.random.default_rng([config.seed, epoch]).permutation(len(y))
        for batch_index, start in enumerate(range(0, len(y), config.batch_size)):
            idx = order[start : start + config.batch_size]
            dropout_rng = np.random.default_rng([config.seed, epoch, batch_index, 1])
            logits, cache = forward(
                params,
                x[idx],
                training=True,
                rng=dropout_rng,
                conv_dropout=config.dropout_conv,
                linear_dropout=config.dropout_linear,
            )
            loss, dlogits = bce_with_logits(logits, y[idx])
            if not np.isfinite(loss):
                raise TrainingDivergedError(
                    f"Loss became {loss} at epoch {epoch}, batch {batch_index}",
                    detail={"epoch": epoch, "batch": batch_index},
                )
            optimizer.step(params, backward(params, cache, dlogits))

        train_loss, train_wacc = _evaluate(params, x, y, config.batch_size)
        valid_loss, valid_wacc = (None, None)
        if valid is not None:
            valid_loss, valid_wacc = _evaluate(params, valid_x, valid_y, config.batch_size)
        rows.append(
            {
                "epoch": epoch,
                "train_loss": train_loss,
                "valid_loss": valid_loss,
                "train_wacc": train_wacc,
                "valid_wacc": valid_wacc,
            }
        )
        logger.debug(f"Epoch {epoch}: train loss {train_loss:.5f}, wacc {train_wacc}")

    history = pd.DataFrame(rows, columns=HISTORY_COLUMNS)
    logger.success(
        f"✅ Training done: final loss {history['train_loss'].iloc[-1]:.5f}, "
        f"wacc {history['train_wacc'].iloc[-1]}"
    )
    return TrainingResult(model=DetectorModel(params), history=history)


def train(
    clips: Sequence[AudioClip],
    labels: Sequence[bool],
    config: Optional[TrainConfig] = None,
    valid: Optional[Tuple[Sequence[AudioClip], Sequence[bool]]] = None,
) -> TrainingResult:
    """Preprocess clips once (cached spectrograms) and train on them"""
    if len(clips) != len(labels):
        raise UsageError(f"{len(clips)} clips vs {len(labels)} labels")
    _check_labels(np.asarray(labels, dtype=bool), "Training")
    x = featurize(clips)
    valid_features = None
    if valid is not None:
        valid_features = (featurize(valid[0]), valid[1])
    return train_on_features(x, labels, config, valid_features)


def gradient_check(
    model: DetectorModel,
    batch: np.ndarray,
    labels: Sequence[bool],
    h: float = 1e-4,
    fraction: float = 0.01,
    seed: int = 0,
    gradient_hook: Optional[GradientHook] = None,
) -> float:
    """
    Max relative error between analytic and central-difference gradients

    A random `fraction` of every tensor (at least one entry) is checked.
    gradient_hook, if given, transforms the analytic gradients before the
    comparison.
    """
    batch = np.asarray(batch, dtype=np.float64)
    y = np.asarray(labels, dtype=np.float64)
    if len(batch) > 4:
        raise UsageError(f"Gradient check expects at most 4 clips, got {len(batch)}")

    params = model.as_float64()
    _, grads = loss_and_gradients(params, batch, y)
    if gradient_hook is not None:
        grads = gradient_hook(grads)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for name, tensor in params.items():
        flat = tensor.reshape(-1)
        n_checked = max(1, int(round(fraction * flat.size)))
        for i in rng.choice(flat.size, size=n_checked, replace=False):
            original = flat[i]
            flat[i] = original + h
            loss_plus, _ = bce_with_logits(forward(params, batch)[0], y)
            flat[i] = original - h
            loss_minus, _ = bce_with_logits(forward(params, batch)[0], y)
            flat[i] = original
            numeric = (loss_plus - loss_minus) / (2.0 * h)
            analytic = grads[name].reshape(-1)[i]
            error = abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-6)
            worst = max(worst, error)

    logger.info(f"🔍 Gradient check: max relative error {worst:.3e}")
    return worst
