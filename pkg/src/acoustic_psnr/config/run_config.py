"""
Run configurations

One INI file holds a section per subcommand ([gen], [train], [augment],
[psnr], [fit], [area], [report]). Values are validated by the pydantic
models below; command-line flags override file values, and the resolved
config is written to run_config.json next to the command's outputs.
"""

import configparser
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Type, TypeVar, Union

from loguru import logger
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from ..exceptions import DataError, UsageError
from ..reporting.exports import read_json, write_json

SECTIONS = ("gen", "train", "augment", "psnr", "fit", "area", "report")
RUN_CONFIG_FILE = "run_config.json"

ConfigT = TypeVar("ConfigT", bound="RunConfigBase")


class RunConfigBase(BaseModel):
    """Common behaviour: unknown keys are rejected, comma lists are split"""

    model_config = ConfigDict(extra="forbid")

    @field_validator("*", mode="before")
    @classmethod
    def _split_lists(cls, value, info):
        field = cls.model_fields.get(info.field_name)
        annotation = str(field.annotation) if field is not None else ""
        if isinstance(value, str) and annotation.startswith(("typing.List", "list", "List")):
            return [item.strip() for item in value.split(",") if item.strip()]
        return value


class GenConfig(RunConfigBase):
    out: Path = Path("runs/dataset")
    pos: int = Field(200, ge=1)
    neg: int = Field(800, ge=1)
    sessions: int = Field(3, ge=1)
    seed: int = 0
    noise_kinds: List[Literal["rain", "wind", "biophony"]] = ["rain", "wind", "biophony"]
    snr_lo: float = 10.0
    snr_hi: float = 30.0


class TrainRunConfig(RunConfigBase):
    dataset: Path
    out: Path = Path("runs/conf0")
    name: Optional[str] = None
    augm_manifest: Optional[Path] = None
    # Desk-scale default; full-scale training runs 1000 epochs
    epochs: int = Field(20, ge=1)
    learning_rate: float = Field(1e-5, gt=0, lt=1)
    batch_size: int = Field(32, ge=1)
    dropout_conv: float = Field(0.2, gt=0, lt=1)
    dropout_linear: float = Field(0.5, gt=0, lt=1)
    seed: int = 0


class AugmentConfig(RunConfigBase):
    dataset: Path
    out: Path = Path("runs/augm")
    curve: Optional[Path] = None
    mode: Optional[Literal["high", "transition", "low"]] = None
    snr_lo: Optional[float] = None
    snr_hi: Optional[float] = None
    width_db: float = Field(10.0, gt=0)
    fraction: float = Field(0.2, gt=0, le=1)
    seed: int = 0

    @model_validator(mode="after")
    def _window_source(self):
        explicit = self.snr_lo is not None and self.snr_hi is not None
        from_curve = self.curve is not None and self.mode is not None
        if explicit == from_curve:
            raise ValueError("give either snr_lo and snr_hi, or curve and mode")
        return self


class PsnrConfig(RunConfigBase):
    out: Path = Path("runs/psnr")
    name: Optional[str] = None
    detector: str = "energy:10"
    noise_kind: Literal["all", "rain", "wind", "biophony"] = "all"
    analytic: bool = False
    duty: float = Field(0.5, gt=0, le=1)
    n_calls: int = Field(100, ge=1)
    n_noises: int = Field(100, ge=1)
    snr_lo: float = -30.0
    snr_hi: float = 10.0
    step: float = Field(1.0, gt=0)
    n_per_point: int = Field(1000, ge=1)
    n_boot: int = Field(200, ge=0)
    p_lo: float = Field(0.05, gt=0, lt=1)
    p_hi: float = Field(0.95, gt=0, lt=1)
    seed: int = 0


class FitConfig(RunConfigBase):
    rates: Path
    out: Path = Path("runs/fit")
    label: Optional[str] = None
    n_boot: int = Field(200, ge=0)
    p_lo: float = Field(0.05, gt=0, lt=1)
    p_hi: float = Field(0.95, gt=0, lt=1)
    seed: int = 0


class AreaConfig(RunConfigBase):
    out: Path = Path("runs/area")
    fits: List[Path] = []
    x0: Optional[float] = None
    k: Optional[float] = Field(None, gt=0)
    v: Optional[float] = Field(None, gt=0)
    p: List[float] = [0.9]
    l1m: float = 85.0
    ln: List[float] = [30.0, 35.0, 40.0, 45.0, 50.0, 55.0, 60.0]
    calibration_offset: float = 0.0
    source_level_uncertainty: float = Field(2.0, ge=0)

    @field_validator("p")
    @classmethod
    def _open_interval(cls, values: List[float]) -> List[float]:
        for p in values:
            if not 0.0 < p < 1.0:
                raise ValueError(f"p must lie in (0, 1), got {p}")
        return values

    @model_validator(mode="after")
    def _fit_source(self):
        explicit = [self.x0, self.k, self.v]
        if self.fits and any(value is not None for value in explicit):
            raise ValueError("give either fit files or x0/k/v, not both")
        if not self.fits and any(value is None for value in explicit):
            raise ValueError("give fit files or all of x0, k and v")
        return self


class ReportConfig(RunConfigBase):
    runs: List[Path] = []
    out: Path = Path("runs/report.md")
    title: str = "Detector evaluation report"


SECTION_MODELS: Dict[str, Type[RunConfigBase]] = {
    "gen": GenConfig,
    "train": TrainRunConfig,
    "augment": AugmentConfig,
    "psnr": PsnrConfig,
    "fit": FitConfig,
    "area": AreaConfig,
    "report": ReportConfig,
}


def read_config_file(path: Union[str, Path]) -> Dict[str, Dict[str, str]]:
    """Parse the INI file into {section: {key: raw string}}"""
    path = Path(path)
    if not path.exists():
        raise DataError(f"Config file not found: {path}")
    parser = configparser.ConfigParser(interpolation=None)
    try:
        parser.read(path)
    except configparser.Error as e:
        raise DataError(f"Cannot parse config file {path}: {e}") from e
    unknown = set(parser.sections()) - set(SECTIONS)
    if unknown:
        raise UsageError(f"Unknown config sections in {path}: {sorted(unknown)}")
    return {section: dict(parser.items(section)) for section in parser.sections()}


def resolve_config(
    model: Type[ConfigT],
    section: str,
    config_path: Optional[Union[str, Path]] = None,
    overrides: Optional[Dict[str, Any]] = None,
) -> ConfigT:
    """
    File values for `section`, overridden by every flag that was given

    Args:
        model: pydantic model of the section
        section: INI section name
        config_path: optional INI file
        overrides: flag values; None means "not given"

    Returns:
        Validated config (pydantic ValidationError on bad values)
    """
    values: Dict[str, Any] = {}
    if config_path is not None:
        values.update(read_config_file(config_path).get(section, {}))
    for key, value in (overrides or {}).items():
        if value is None or (isinstance(value, (list, tuple)) and len(value) == 0):
            continue
        values[key] = value
    config = model(**values)
    logger.debug(f"⚙️ Resolved [{section}] config: {config.model_dump(mode='json')}")
    return config


def write_run_config(out_dir: Union[str, Path], command: str, config: BaseModel) -> Path:
    """
    Record the resolved config under its command in out_dir/run_config.json

    Commands sharing an output directory (train then psnr) keep each
    other's entries. A `name` in the config labels the run in reports.
    """
    path = Path(out_dir) / RUN_CONFIG_FILE
    payload = read_json(path) if path.exists() else {}
    payload[command] = config.model_dump(mode="json")
    name = getattr(config, "name", None)
    if name:
        payload["name"] = name
    return write_json(path, payload)


__all__ = [
    "SECTIONS",
    "RUN_CONFIG_FILE",
    "GenConfig",
    "TrainRunConfig",
    "AugmentConfig",
    "PsnrConfig",
    "FitConfig",
    "AreaConfig",
    "ReportConfig",
    "SECTION_MODELS",
    "read_config_file",
    "resolve_config",
    "write_run_config",
]
