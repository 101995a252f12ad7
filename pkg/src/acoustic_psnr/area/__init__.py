"""
Detection distance and area from a psychometric fit under spherical spreading
"""

from .model import (
    DEFAULT_SOURCE_LEVEL_DB,
    RECORDER_SENSITIVITY_UPA,
    SOURCE_LEVEL_UNCERTAINTY_DB,
    AreaModelParams,
    area_range,
    area_ratio_for_noise_change,
    area_vs_noise_table,
    calibration_offset_db,
    dbfs_to_spl,
    detection_area,
    detection_area_factored,
    detection_radius,
    level_at_distance,
    radius_range,
)

__all__ = [
    "DEFAULT_SOURCE_LEVEL_DB",
    "RECORDER_SENSITIVITY_UPA",
    "SOURCE_LEVEL_UNCERTAINTY_DB",
    "AreaModelParams",
    "area_range",
    "area_ratio_for_noise_change",
    "area_vs_noise_table",
    "calibration_offset_db",
    "dbfs_to_spl",
    "detection_area",
    "detection_area_factored",
    "detection_radius",
    "level_at_distance",
    "radius_range",
]
