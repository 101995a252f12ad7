"""
Reporting

Deterministic JSON/CSV exports of curves and fits, SVG figures and the
Markdown summary across run directories.
"""

from .exports import (
    curve_key,
    curve_to_dict,
    load_curve,
    load_fit,
    read_json,
    save_curve,
    to_jsonable,
    write_csv,
    write_json,
)
from .markdown import build_report, markdown_table, write_report
from .plots import plot_area, plot_curve

__all__ = [
    "curve_key",
    "curve_to_dict",
    "load_curve",
    "load_fit",
    "read_json",
    "save_curve",
    "to_jsonable",
    "write_csv",
    "write_json",
    "build_report",
    "markdown_table",
    "write_report",
    "plot_area",
    "plot_curve",
]
