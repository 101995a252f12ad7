"""
Markdown summary of one or more run directories: classification metrics per
(configuration, split), p(snr) fits and metrics per curve, and area tables
"""

from pathlib import Path
from typing import List, Optional, Sequence, Union

import pandas as pd
from loguru import logger

from ..exceptions import DataError
from .exports import read_json

METRIC_COLUMNS = ["loss", "weighted_accuracy", "precision", "recall", "f1", "geometric_f"]


def _fmt(value, digits: int = 3) -> str:
    if value is None or (isinstance(value, float) and pd.isna(value)):
        return "n/a"
    if isinstance(value, float):
        return f"{value:.{digits}f}"
    return str(value)


def markdown_table(frame: pd.DataFrame, digits: int = 3) -> str:
    header = "| " + " | ".join(str(c) for c in frame.columns) + " |"
    rule = "|" + "|".join("---" for _ in frame.columns) + "|"
    rows = [
        "| " + " | ".join(_fmt(v, digits) for v in row) + " |"
        for row in frame.itertuples(index=False)
    ]
    return "\n".join([header, rule, *rows])


def _run_name(run_dir: Path) -> str:
    config = run_dir / "run_config.json"
    if config.exists():
        name = read_json(config).get("name")
        if name:
            return str(name)
    return run_dir.name


def collect_metrics(run_dirs: Sequence[Path]) -> pd.DataFrame:
    rows = []
    for run_dir in run_dirs:
        path = run_dir / "metrics.json"
        if not path.exists():
            continue
        for split, summary in sorted(read_json(path).items()):
            rows.append({"configuration": _run_name(run_dir), "split": split, **summary})
    return pd.DataFrame(rows, columns=["configuration", "split", *METRIC_COLUMNS])


def collect_curves(run_dirs: Sequence[Path]) -> pd.DataFrame:
    rows = []
    for run_dir in run_dirs:
        for path in sorted(run_dir.glob("curve_*.json")):
            data = read_json(path)
            fit = data.get("fit") or {}
            metrics = data.get("metrics") or {}
            fit_metrics = metrics.get("fit") or {}
            empirical = metrics.get("empirical") or {}
            intervals = (data.get("bootstrap") or {}).get("intervals", {})
            ci = intervals.get("snr_50")
            rows.append(
                {
                    "configuration": _run_name(run_dir),
                    "noise": data.get("label"),
                    "x0": fit.get("x0"),
                    "k": fit.get("k"),
                    "v": fit.get("v"),
                    "snr_50": fit_metrics.get("snr_50"),
                    "snr_50 CI": f"[{ci[0]:.2f}, {ci[1]:.2f}]" if ci else None,
                    "infl_50": fit_metrics.get("infl_50"),
                    "Δsnr": fit_metrics.get("interval_width"),
                    "snr_50 (emp.)": empirical.get("snr_50"),
                    "infl_50 (emp.)": empirical.get("infl_50"),
                }
            )
    return pd.DataFrame(rows)


def collect_areas(run_dirs: Sequence[Path]) -> pd.DataFrame:
    frames = []
    for run_dir in run_dirs:
        for path in sorted(run_dir.glob("area_*.csv")):
            table = pd.read_csv(path)
            table.insert(0, "configuration", _run_name(run_dir))
            frames.append(table)
    return pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()


def build_report(
    run_dirs: Sequence[Union[str, Path]], title: str = "Detector evaluation report"
) -> str:
    """Assemble the Markdown report text"""
    run_dirs = [Path(d) for d in run_dirs]
    missing = [str(d) for d in run_dirs if not d.is_dir()]
    if missing:
        raise DataError(f"Run directories not found: {missing}")

    sections: List[str] = [f"# {title}", ""]
    metrics = collect_metrics(run_dirs)
    if not metrics.empty:
        sections += ["## Classification metrics", "", markdown_table(metrics), ""]
    curves = collect_curves(run_dirs)
    if not curves.empty:
        overall = curves[curves["noise"] == "all"]
        per_noise = curves[curves["noise"] != "all"]
        if not overall.empty:
            sections += ["## p(snr) fits", "", markdown_table(overall.drop(columns="noise")), ""]
        if not per_noise.empty:
            sections += ["## p(snr) by noise type", "", markdown_table(per_noise), ""]
    areas = collect_areas(run_dirs)
    if not areas.empty:
        columns = [c for c in ["configuration", "label", "p", "noise_level", "radius_m", "area_m2"] if c in areas]
        sections += ["## Detection area", "", markdown_table(areas[columns], digits=1), ""]

    if len(sections) == 2:
        raise DataError(f"No results found in {', '.join(str(d) for d in run_dirs)}")
    logger.info(f"📝 Report assembled from {len(run_dirs)} run directories")
    return "\n".join(sections)


def write_report(
    run_dirs: Sequence[Union[str, Path]], out_path: Union[str, Path], title: Optional[str] = None
) -> Path:
    out_path = Path(out_path)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    text = build_report(run_dirs, title) if title else build_report(run_dirs)
    out_path.write_text(text)
    return out_path


__all__ = ["build_report", "write_report", "markdown_table"]
