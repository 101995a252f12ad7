"""
Result Exports
Deterministic JSON / CSV files for curves, fits and metric reports
"""

import json
import math
from dataclasses import asdict, is_dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd
from loguru import logger
from pydantic import BaseModel

from ..exceptions import DataError
from ..psychometric import LogisticFit, PsychometricCurve

PathLike = Union[str, Path]


def to_jsonable(value: Any) -> Any:
    """Plain JSON types from numpy scalars/arrays, dataclasses and tuples"""
    if isinstance(value, BaseModel):
        return to_jsonable(value.model_dump())
    if hasattr(value, "to_dict") and not isinstance(value, pd.DataFrame):
        return to_jsonable(value.to_dict())
    if is_dataclass(value):
        return to_jsonable(asdict(value))
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating, float)):
        value = float(value)
        return value if math.isfinite(value) else None
    if isinstance(value, Path):
        return value.as_posix()
    return value


def write_json(path: PathLike, payload: Any) -> Path:
    """Sorted-key, indented JSON so reruns are byte-identical"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(to_jsonable(payload), indent=2, sort_keys=True) + "\n")
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise DataError(f"File not found: {path}")
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as e:
        raise DataError(f"Invalid JSON in {path}: {e}") from e


def write_csv(path: PathLike, frame: pd.DataFrame) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format="%.10g")
    return path


def curve_to_dict(curve: PsychometricCurve, extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Points, fit, bootstrap intervals and both metric variants"""
    payload: Dict[str, Any] = {
        "label": curve.label,
        "points": [
            {"snr": p.snr, "n": p.n_trials, "detected": p.n_detected, "rate": p.detect_rate}
            for p in curve.points
        ],
        "fit": curve.fit.to_dict() if curve.fit is not None else None,
        "bootstrap": curve.bootstrap.to_dict() if curve.bootstrap is not None else None,
        "metrics": {
            name: metrics.to_dict() if metrics is not None else None
            for name, metrics in curve.metrics.items()
        },
    }
    if extra:
        payload.update(extra)
    return payload


def save_curve(
    curve: PsychometricCurve, out_dir: PathLike, extra: Optional[Dict[str, Any]] = None
) -> Dict[str, Path]:
    """Write curve_<label>.json and curve_<label>.csv"""
    out_dir = Path(out_dir)
    paths = {
        "json": write_json(out_dir / f"curve_{curve.label}.json", curve_to_dict(curve, extra)),
        "csv": write_csv(out_dir / f"curve_{curve.label}.csv", curve.to_frame()),
    }
    logger.info(f"💾 Saved curve '{curve.label}' to {paths['json']}")
    return paths


def load_curve(path: PathLike) -> PsychometricCurve:
    """Rebuild a curve (points and fit) from a curve JSON"""
    data = read_json(path)
    if "points" not in data:
        raise DataError(f"{path} is not a curve file (no 'points')")
    frame = pd.DataFrame(data["points"])
    curve = PsychometricCurve.from_frame(frame, label=data.get("label", Path(path).stem))
    if data.get("fit"):
        fit = data["fit"]
        curve.fit = LogisticFit(x0=fit["x0"], k=fit["k"], v=fit["v"], nll=fit.get("nll"))
    return curve


def load_fit(path: PathLike) -> LogisticFit:
    curve = load_curve(path)
    if curve.fit is None:
        raise DataError(f"{path} holds no fit")
    return curve.fit


def curve_key(path: PathLike) -> str:
    """
    Identify a curve file across runs: `<run name>_<curve label>`

    The run name is the `name` recorded in the run_config.json next to the
    file; without one the curve label alone is used.
    """
    path = Path(path)
    label = load_curve(path).label
    config = path.parent / "run_config.json"
    name = read_json(config).get("name") if config.exists() else None
    return f"{name}_{label}" if name else label
