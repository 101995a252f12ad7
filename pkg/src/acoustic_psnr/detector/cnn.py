"""
CNN forward / backward passes in numpy

Input batches are (N, 1, 40, T) log-mel stacks. Each conv block is
Conv -> ReLU -> MaxPool(2, 2) -> Dropout; the time axis is then average-pooled
to POOLED_TIME_BINS bins and flattened (channel, frequency, time order) into
the two-layer head. Outputs are logits; the sigmoid is applied by callers.
"""

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.special import expit

from ..exceptions import ClipTooShortError, UsageError
from .model import CONV_LAYERS, LINEAR_LAYERS, POOLED_TIME_BINS

N_BANDS = 40
CONV_DROPOUT = 0.2
LINEAR_DROPOUT = 0.5


def sigmoid(z: np.ndarray) -> np.ndarray:
    return expit(z)


# ---------------------------------------------------------------------------
# Layer primitives
# ---------------------------------------------------------------------------


def _conv_out(size: int, kernel: int, stride: int, padding: int) -> int:
    return (size + 2 * padding - kernel) // stride + 1


def _strided(xp: np.ndarray, i: int, j: int, stride: int, h_out: int, w_out: int) -> np.ndarray:
    return xp[:, :, i : i + stride * (h_out - 1) + 1 : stride, j : j + stride * (w_out - 1) + 1 : stride]


def conv2d_forward(
    x: np.ndarray, weight: np.ndarray, bias: np.ndarray, stride: int, padding: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Zero-padded 2-D cross-correlation; returns (output, padded input)"""
    n, _, h, w = x.shape
    out_ch, _, k, _ = weight.shape
    h_out = _conv_out(h, k, stride, padding)
    w_out = _conv_out(w, k, stride, padding)
    xp = np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))
    out = np.zeros((n, out_ch, h_out, w_out))
    for i in range(k):
        for j in range(k):
            patch = _strided(xp, i, j, stride, h_out, w_out)
            out += np.einsum("nchw,oc->nohw", patch, weight[:, :, i, j], optimize=True)
    out += bias[None, :, None, None]
    return out, xp


def conv2d_backward(
    dout: np.ndarray, xp: np.ndarray, weight: np.ndarray, stride: int, padding: int, in_shape
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Gradients (dx, dweight, dbias) accumulated in a fixed kernel-offset order"""
    _, _, h, w = in_shape
    k = weight.shape[2]
    h_out, w_out = dout.shape[2], dout.shape[3]
    dxp = np.zeros_like(xp)
    dweight = np.zeros_like(weight)
    for i in range(k):
        for j in range(k):
            patch = _strided(xp, i, j, stride, h_out, w_out)
            dweight[:, :, i, j] = np.einsum("nchw,nohw->oc", patch, dout, optimize=True)
            dxp[:, :, i : i + stride * (h_out - 1) + 1 : stride, j : j + stride * (w_out - 1) + 1 : stride] += (
                np.einsum("nohw,oc->nchw", dout, weight[:, :, i, j], optimize=True)
            )
    dbias = dout.sum(axis=(0, 2, 3))
    dx = dxp[:, :, padding : padding + h, padding : padding + w]
    return dx, dweight, dbias


def maxpool_forward(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """2x2 / stride 2 max pooling, odd trailing rows/columns dropped; ties go to the first element"""
    n, c, h, w = x.shape
    h2, w2 = h // 2, w // 2
    blocks = (
        x[:, :, : 2 * h2, : 2 * w2]
        .reshape(n, c, h2, 2, w2, 2)
        .transpose(0, 1, 2, 4, 3, 5)
        .reshape(n, c, h2, w2, 4)
    )
    argmax = blocks.argmax(axis=-1)
    out = np.take_along_axis(blocks, argmax[..., None], axis=-1)[..., 0]
    return out, argmax


def maxpool_backward(dout: np.ndarray, argmax: np.ndarray, in_shape) -> np.ndarray:
    n, c, h, w = in_shape
    h2, w2 = argmax.shape[2], argmax.shape[3]
    blocks = np.zeros((n, c, h2, w2, 4))
    np.put_along_axis(blocks, argmax[..., None], dout[..., None], axis=-1)
    routed = blocks.reshape(n, c, h2, w2, 2, 2).transpose(0, 1, 2, 4, 3, 5).reshape(n, c, 2 * h2, 2 * w2)
    dx = np.zeros(in_shape)
    dx[:, :, : 2 * h2, : 2 * w2] = routed
    return dx


@lru_cache(maxsize=64)
def adaptive_pool_matrix(length: int, bins: int = POOLED_TIME_BINS) -> np.ndarray:
    """(length, bins) averaging matrix with floor/ceil bin boundaries"""
    if length < 1:
        raise ClipTooShortError("Nothing left on the time axis to pool")
    matrix = np.zeros((length, bins))
    for b in range(bins):
        start = (b * length) // bins
        end = -((-(b + 1) * length) // bins)
        matrix[start:end, b] = 1.0 / (end - start)
    matrix.setflags(write=False)
    return matrix


def _dropout_mask(rng: np.random.Generator, shape, rate: float) -> np.ndarray:
    return (rng.random(shape) >= rate) / (1.0 - rate)


# ---------------------------------------------------------------------------
# Shape bookkeeping
# ---------------------------------------------------------------------------


def layer_shapes(n_frames: int, n_bands: int = N_BANDS) -> List[Tuple[str, Tuple[int, ...]]]:
    """Per-sample activation shapes through the network for a given frame count"""
    shapes = [("input", (1, n_bands, n_frames))]
    h, w = n_bands, n_frames
    for layer in CONV_LAYERS:
        h = _conv_out(h, layer.kernel, layer.stride, layer.padding)
        w = _conv_out(w, layer.kernel, layer.stride, layer.padding)
        shapes.append((layer.name, (layer.out_features, h, w)))
        h, w = h // 2, w // 2
        shapes.append((f"{layer.name}.pool", (layer.out_features, h, w)))
    channels = CONV_LAYERS[-1].out_features
    shapes.append(("time_pool", (channels, h, POOLED_TIME_BINS)))
    shapes.append(("flatten", (channels * h * POOLED_TIME_BINS,)))
    for layer in LINEAR_LAYERS:
        shapes.append((layer.name, (layer.out_features,)))
    return shapes


@lru_cache(maxsize=1)
def min_input_frames(n_bands: int = N_BANDS) -> int:
    """Smallest frame count that leaves at least one time step after the last pool"""
    frames = 1
    while layer_shapes(frames, n_bands)[-5][1][2] < 1:
        frames += 1
    return frames


def check_input(x: np.ndarray) -> None:
    if x.ndim != 4 or x.shape[1] != 1:
        raise UsageError(f"Expected a (N, 1, bands, frames) batch, got shape {x.shape}")
    if x.shape[2] != N_BANDS:
        raise UsageError(f"Expected {N_BANDS} mel bands, got {x.shape[2]}")
    if x.shape[3] < min_input_frames():
        raise ClipTooShortError(
            f"Input has {x.shape[3]} frames; the conv stack needs at least {min_input_frames()}"
        )


# ---------------------------------------------------------------------------
# Network passes
# ---------------------------------------------------------------------------


@dataclass
class ForwardCache:
    """Intermediate values kept for backpropagation"""

    conv: List[dict] = field(default_factory=list)
    pooled_shape: Tuple[int, ...] = ()
    pool_matrix: Optional[np.ndarray] = None
    flat: Optional[np.ndarray] = None
    hidden_pre: Optional[np.ndarray] = None
    hidden: Optional[np.ndarray] = None
    hidden_mask: Optional[np.ndarray] = None


def forward(
    params: Dict[str, np.ndarray],
    x: np.ndarray,
    training: bool = False,
    rng: Optional[np.random.Generator] = None,
    conv_dropout: float = CONV_DROPOUT,
    linear_dropout: float = LINEAR_DROPOUT,
) -> Tuple[np.ndarray, ForwardCache]:
    """
    Forward pass returning logits of shape (N,)

    Dropout is active only when training is True (inverted dropout, so
    inference needs no rescaling).
    """
    check_input(x)
    if training and rng is None:
        raise UsageError("Training forward pass needs a random generator for dropout")

    cache = ForwardCache()
    h = np.asarray(x, dtype=np.float64)
    for layer in CONV_LAYERS:
        pre, xp = conv2d_forward(
            h, params[f"{layer.name}.weight"], params[f"{layer.name}.bias"], layer.stride, layer.padding
        )
        act = np.maximum(pre, 0.0)
        pooled, argmax = maxpool_forward(act)
        mask = _dropout_mask(rng, pooled.shape, conv_dropout) if training and conv_dropout > 0 else None
        entry = {"in_shape": h.shape, "xp": xp, "pre": pre, "argmax": argmax, "mask": mask}
        cache.conv.append(entry)
        h = pooled * mask if mask is not None else pooled

    n, c, f, t = h.shape
    cache.pooled_shape = h.shape
    cache.pool_matrix = adaptive_pool_matrix(t)
    flat = (h @ cache.pool_matrix).reshape(n, c * f * POOLED_TIME_BINS)
    cache.flat = flat

    fc1, fc2 = LINEAR_LAYERS
    hidden_pre = flat @ params[f"{fc1.name}.weight"].T + params[f"{fc1.name}.bias"]
    hidden = np.maximum(hidden_pre, 0.0)
    if training and linear_dropout > 0:
        cache.hidden_mask = _dropout_mask(rng, hidden.shape, linear_dropout)
        hidden = hidden * cache.hidden_mask
    cache.hidden_pre = hidden_pre
    cache.hidden = hidden

    logits = hidden @ params[f"{fc2.name}.weight"].T + params[f"{fc2.name}.bias"]
    return logits[:, 0], cache


def backward(
    params: Dict[str, np.ndarray], cache: ForwardCache, dlogits: np.ndarray
) -> Dict[str, np.ndarray]:
    """Gradients of the loss w.r.t. every tensor given dL/dlogits of shape (N,)"""
    grads: Dict[str, np.ndarray] = {}
    fc1, fc2 = LINEAR_LAYERS
    dz = dlogits[:, None]

    grads[f"{fc2.name}.weight"] = dz.T @ cache.hidden
    grads[f"{fc2.name}.bias"] = dz.sum(axis=0)
    dhidden = dz @ params[f"{fc2.name}.weight"]
    if cache.hidden_mask is not None:
        dhidden = dhidden * cache.hidden_mask
    dhidden = dhidden * (cache.hidden_pre > 0)

    grads[f"{fc1.name}.weight"] = dhidden.T @ cache.flat
    grads[f"{fc1.name}.bias"] = dhidden.sum(axis=0)
    dflat = dhidden @ params[f"{fc1.name}.weight"]

    n, c, f, _ = cache.pooled_shape
    dh = dflat.reshape(n, c, f, POOLED_TIME_BINS) @ cache.pool_matrix.T

    for layer, entry in zip(reversed(CONV_LAYERS), reversed(cache.conv)):
        if entry["mask"] is not None:
            dh = dh * entry["mask"]
        dact = maxpool_backward(dh, entry["argmax"], entry["pre"].shape)
        dpre = dact * (entry["pre"] > 0)
        dh, dweight, dbias = conv2d_backward(
            dpre, entry["xp"], params[f"{layer.name}.weight"], layer.stride, layer.padding, entry["in_shape"]
        )
        grads[f"{layer.name}.weight"] = dweight
        grads[f"{layer.name}.bias"] = dbias

    return grads


def bce_with_logits(logits: np.ndarray, labels: np.ndarray) -> Tuple[float, np.ndarray]:
    """Mean binary cross-entropy and its gradient w.r.t. the logits"""
    labels = np.asarray(labels, dtype=np.float64)
    loss = float(np.mean(np.logaddexp(0.0, logits) - labels * logits))
    dlogits = (sigmoid(logits) - labels) / logits.shape[0]
    return loss, dlogits
