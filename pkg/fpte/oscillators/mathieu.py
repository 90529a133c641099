"""
Averaged models of the Mathieu oscillator.

Energy averaging gives, with A = pi nu1^2 S11(sqrt(alpha1)) and
c = pi nu2^2 S22(2 sqrt(alpha1)) / alpha1,

    m(H) = -beta1 H + A + c H,        sigma^2(H) = 2 A H + c H^2,

and amplitude averaging gives

    m_A(b) = -beta1 b / 2 + A / (2 alpha1 b) + 3 c b / 8,
    sigma_A^2(b) = A / alpha1 + c b^2 / 4.

Both describe the same process through H = alpha1 b^2 / 2, so their stationary
densities agree after the change of variables.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from fpte.diffusion.model import DiffusionModel
from fpte.errors import DomainError
from fpte.oscillators.params import MathieuParams


def mathieu_energy_model(p: MathieuParams, energy_cap: float) -> DiffusionModel:
    if not energy_cap > 0.0:
        raise DomainError(f"energy cap must be positive, got {energy_cap}")
    A, c, beta1 = p.additive_strength, p.parametric_strength, p.beta1

    def drift(H):
        return -beta1 * H + A + c * H

    def diffusion_sq(H):
        return 2.0 * A * H + c * H**2

    return DiffusionModel(drift, diffusion_sq, 0.0, float(energy_cap), name="mathieu-energy")


def ariaratnam_amplitude_model(p: MathieuParams, amplitude_cap: float) -> DiffusionModel:
    if not amplitude_cap > 0.0:
        raise DomainError(f"amplitude cap must be positive, got {amplitude_cap}")
    A, c, beta1, alpha1 = p.additive_strength, p.parametric_strength, p.beta1, p.alpha1

    def drift(b):
        return -0.5 * beta1 * b + A / (2.0 * alpha1 * b) + 0.375 * c * b

    def diffusion_sq(b):
        return A / alpha1 + 0.25 * c * b**2

    return DiffusionModel(drift, diffusion_sq, 0.0, float(amplitude_cap), name="mathieu-amplitude")


def amplitude_density_from_energy(pH: Callable, alpha1: float) -> Callable[[np.ndarray], np.ndarray]:
    """b -> pH(alpha1 b^2 / 2) sqrt(2 alpha1 H), the density of b = sqrt(2 H / alpha1)."""
    if not alpha1 > 0.0:
        raise DomainError(f"alpha1 must be positive, got {alpha1}")

    def density(b):
        b = np.asarray(b, dtype=float)
        H = 0.5 * alpha1 * b**2
        return np.asarray(pH(H), dtype=float) * np.sqrt(2.0 * alpha1 * H)

    return density
