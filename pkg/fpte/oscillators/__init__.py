from fpte.oscillators.colored import CoefficientTable, duffing_colored_model, duffing_colored_table
from fpte.oscillators.duffing import (
    DuffingGeometry,
    duffing_damping_average,
    duffing_geometry,
    duffing_orbit,
    duffing_white_coefficients,
    duffing_white_model,
)
from fpte.oscillators.linear import linear_amplitude_model
from fpte.oscillators.mathieu import amplitude_density_from_energy, ariaratnam_amplitude_model, mathieu_energy_model
from fpte.oscillators.params import DuffingParams, LinearOscParams, MathieuParams

__all__ = [
    "CoefficientTable",
    "DuffingGeometry",
    "DuffingParams",
    "LinearOscParams",
    "MathieuParams",
    "amplitude_density_from_energy",
    "ariaratnam_amplitude_model",
    "duffing_colored_model",
    "duffing_colored_table",
    "duffing_damping_average",
    "duffing_geometry",
    "duffing_orbit",
    "duffing_white_coefficients",
    "duffing_white_model",
    "linear_amplitude_model",
    "mathieu_energy_model",
]
