"""
Detector Model
Fixed CNN architecture, seeded initialisation and the binary weight format
"""

import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
from loguru import logger

from ..exceptions import ShapeMismatchError, WeightFileError

WEIGHT_MAGIC = b"PTRM"
WEIGHT_FORMAT_VERSION = 1

# Time axis is average-pooled to this many bins before flattening
POOLED_TIME_BINS = 7


@dataclass(frozen=True)
class LayerSpec:
    """One trainable layer of the detector"""

    name: str
    kind: str  # "conv" or "linear"
    in_features: int
    out_features: int
    kernel: int = 0
    stride: int = 1
    padding: int = 0

    @property
    def weight_shape(self) -> Tuple[int, ...]:
        if self.kind == "conv":
            return (self.out_features, self.in_features, self.kernel, self.kernel)
        return (self.out_features, self.in_features)

    @property
    def bias_shape(self) -> Tuple[int, ...]:
        return (self.out_features,)

    @property
    def fan_in(self) -> int:
        if self.kind == "conv":
            return self.in_features * self.kernel * self.kernel
        return self.in_features

    @property
    def hyperparameters(self) -> Dict[str, int]:
        if self.kind == "conv":
            return {"kernel": self.kernel, "stride": self.stride, "padding": self.padding}
        return {}


# Conv + ReLU + MaxPool(2, 2) blocks, then Linear + ReLU and Linear + Sigmoid
ARCHITECTURE: Tuple[LayerSpec, ...] = (
    LayerSpec("conv1", "conv", 1, 16, kernel=3, stride=2, padding=2),
    LayerSpec("conv2", "conv", 16, 32, kernel=3, stride=1, padding=1),
    LayerSpec("conv3", "conv", 32, 64, kernel=3, stride=1, padding=1),
    LayerSpec("conv4", "conv", 64, 32, kernel=3, stride=1, padding=1),
    LayerSpec("fc1", "linear", 32 * POOLED_TIME_BINS, 32),
    LayerSpec("fc2", "linear", 32, 1),
)

CONV_LAYERS = tuple(layer for layer in ARCHITECTURE if layer.kind == "conv")
LINEAR_LAYERS = tuple(layer for layer in ARCHITECTURE if layer.kind == "linear")


def parameter_shapes() -> Dict[str, Tuple[int, ...]]:
    """Ordered mapping tensor name -> shape for every trainable tensor"""
    shapes: Dict[str, Tuple[int, ...]] = {}
    for layer in ARCHITECTURE:
        shapes[f"{layer.name}.weight"] = layer.weight_shape
        shapes[f"{layer.name}.bias"] = layer.bias_shape
    return shapes


def count_parameters() -> int:
    """Trainable parameter count implied by ARCHITECTURE (48,993)"""
    return int(sum(np.prod(shape) for shape in parameter_shapes().values()))


@dataclass
class DetectorModel:
    """Named float32 tensors for every layer of ARCHITECTURE"""

    params: Dict[str, np.ndarray] = field(default_factory=dict)

    def __post_init__(self):
        expected = parameter_shapes()
        for name, shape in expected.items():
            if name not in self.params:
                raise WeightFileError(f"Missing tensor '{name}'")
            found = tuple(self.params[name].shape)
            if found != shape:
                raise ShapeMismatchError(name, shape, found)
        unknown = set(self.params) - set(expected)
        if unknown:
            raise WeightFileError(f"Unknown tensors: {sorted(unknown)}")
        self.params = {
            name: np.ascontiguousarray(self.params[name], dtype=np.float32) for name in expected
        }

    @property
    def layers(self) -> List[Tuple[str, str, List[Tuple[int, ...]], Dict[str, int]]]:
        """(name, kind, tensor shapes, hyperparameters) for each layer"""
        return [
            (layer.name, layer.kind, [layer.weight_shape, layer.bias_shape], layer.hyperparameters)
            for layer in ARCHITECTURE
        ]

    @property
    def n_parameters(self) -> int:
        return int(sum(p.size for p in self.params.values()))

    def as_float64(self) -> Dict[str, np.ndarray]:
        return {name: p.astype(np.float64) for name, p in self.params.items()}

    @classmethod
    def zeros(cls) -> "DetectorModel":
        return cls({name: np.zeros(shape, np.float32) for name, shape in parameter_shapes().items()})

    def save(self, path: Union[str, Path]) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(save_weights(self))
        logger.info(f"💾 Saved detector weights to {path}")
        return path

    @classmethod
    def load(cls, path: Union[str, Path]) -> "DetectorModel":
        path = Path(path)
        if not path.exists():
            raise WeightFileError(f"Weight file not found: {path}")
        return load_weights(path.read_bytes())


def init_model(seed: int = 0) -> DetectorModel:
    """
    Seeded Kaiming-style uniform initialisation

    Weights ~ U(-sqrt(6 / fan_in), +sqrt(6 / fan_in)),
    biases ~ U(-1 / sqrt(fan_in), +1 / sqrt(fan_in)).
    """
    rng = np.random.default_rng(seed)
    params = {}
    for layer in ARCHITECTURE:
        w_bound = np.sqrt(6.0 / layer.fan_in)
        b_bound = 1.0 / np.sqrt(layer.fan_in)
        params[f"{layer.name}.weight"] = rng.uniform(-w_bound, w_bound, layer.weight_shape)
        params[f"{layer.name}.bias"] = rng.uniform(-b_bound, b_bound, layer.bias_shape)
    return DetectorModel(params)


# ---------------------------------------------------------------------------
# Weight file codec
# ---------------------------------------------------------------------------


def save_weights(model: DetectorModel) -> bytes:
    """
    Serialise a model

    Layout (little-endian): magic "PTRM", format version u32, tensor count u32,
    then per tensor: name length u16, UTF-8 name, rank u8, dims u32 each, raw
    float32 values in row-major order.
    """
    chunks = [struct.pack("<4sII", WEIGHT_MAGIC, WEIGHT_FORMAT_VERSION, len(model.params))]
    for name, tensor in model.params.items():
        encoded = name.encode("utf-8")
        chunks.append(struct.pack("<H", len(encoded)))
        chunks.append(encoded)
        chunks.append(struct.pack("<B", tensor.ndim))
        chunks.append(struct.pack(f"<{tensor.ndim}I", *tensor.shape))
        chunks.append(tensor.astype("<f4").tobytes(order="C"))
    return b"".join(chunks)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.offset = 0

    def take(self, n: int, what: str) -> bytes:
        end = self.offset + n
        if end > len(self.data):
            raise WeightFileError(
                f"Truncated weight file while reading {what} "
                f"(need {n} bytes at offset {self.offset}, file has {len(self.data)})"
            )
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: str, what: str) -> tuple:
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def load_weights(data: bytes) -> DetectorModel:
    """Parse a weight file; the model is only built once every tensor validated"""
    reader = _Reader(data)
    magic, version, n_tensors = reader.unpack("<4sII", "header")
    if magic != WEIGHT_MAGIC:
        raise WeightFileError(f"Bad magic {magic!r}, expected {WEIGHT_MAGIC!r}")
    if version != WEIGHT_FORMAT_VERSION:
        raise WeightFileError(f"Unsupported weight format version {version}")

    expected = parameter_shapes()
    params: Dict[str, np.ndarray] = {}
    for _ in range(n_tensors):
        (name_len,) = reader.unpack("<H", "tensor name length")
        try:
            name = reader.take(name_len, "tensor name").decode("utf-8")
        except UnicodeDecodeError as e:
            raise WeightFileError(f"Tensor name is not valid UTF-8: {e}") from e
        (rank,) = reader.unpack("<B", f"rank of '{name}'")
        dims = reader.unpack(f"<{rank}I", f"dims of '{name}'") if rank else ()
        if name not in expected:
            raise WeightFileError(f"Unknown tensor '{name}' in weight file")
        if name in params:
            raise WeightFileError(f"Duplicate tensor '{name}' in weight file")
        if tuple(dims) != expected[name]:
            raise ShapeMismatchError(name, expected[name], tuple(dims))
        count = int(np.prod(dims)) if dims else 1
        raw = reader.take(4 * count, f"values of '{name}'")
        params[name] = np.frombuffer(raw, dtype="<f4").reshape(dims).astype(np.float32)

    if reader.offset != len(data):
        raise WeightFileError(f"{len(data) - reader.offset} trailing bytes after last tensor")
    missing = [name for name in expected if name not in params]
    if missing:
        raise WeightFileError(f"Weight file is missing tensors: {missing}")
    return DetectorModel(params)
