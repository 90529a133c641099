from fpte.diffusion.measures import (
    classify_left_boundary,
    log_scale_density,
    log_speed_density,
    measure_N_l,
    measure_Sigma_l,
    require_entrance,
    scale_density,
    scale_measure,
    speed_density,
    speed_measure,
    stationary_density,
)
from fpte.diffusion.model import BoundaryKind, DiffusionModel, MeasureValue, ScaleExponent

__all__ = [
    "BoundaryKind",
    "DiffusionModel",
    "MeasureValue",
    "ScaleExponent",
    "classify_left_boundary",
    "log_scale_density",
    "log_speed_density",
    "measure_N_l",
    "measure_Sigma_l",
    "require_entrance",
    "scale_density",
    "scale_measure",
    "speed_density",
    "speed_measure",
    "stationary_density",
]
