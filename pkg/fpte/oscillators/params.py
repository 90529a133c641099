"""
Parameter records for the three oscillator families.

All records are frozen dataclasses validated on construction; angles and
amplitudes are in radians throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from fpte.constants import H_CRIT_GUARD
from fpte.errors import DomainError
from fpte.noise.spectra import SpectrumSpec, spectrum_value


@dataclass(frozen=True)
class LinearOscParams:
    """
    x'' + eps 2 d w_n x' + w_n^2 x = sqrt(eps) xi(t)

    Args:
        d: Damping ratio
        omega_n: Undamped natural frequency
        eps: Perturbation scale
        spectrum_at_omega_n: S_xi(w_n)
    """

    d: float
    omega_n: float
    eps: float
    spectrum_at_omega_n: float = 1.0

    def __post_init__(self):
        if not (self.d > 0.0 and self.omega_n > 0.0 and self.eps > 0.0):
            raise DomainError(f"need d, omega_n, eps > 0, got {self.d}, {self.omega_n}, {self.eps}")
        if not self.spectrum_at_omega_n > 0.0:
            raise DomainError(f"spectral density at omega_n must be positive, got {self.spectrum_at_omega_n}")

    @property
    def time_scale(self) -> float:
        """eps d w_n; both r-process coefficients carry this factor."""
        return self.eps * self.d * self.omega_n

    @property
    def amplitude_scale(self) -> float:
        """Physical amplitude per unit r: sqrt(d w_n^3 S(w_n) / 2)."""
        return math.sqrt(0.5 * self.d * self.omega_n**3 * self.spectrum_at_omega_n)


@dataclass(frozen=True)
class MathieuParams:
    """
    Linear oscillator with additive (nu1) and parametric (nu2) excitation.

    S11_at_sqrt_alpha1 and S22_at_2sqrt_alpha1 are the excitation spectra at
    the natural frequency and twice the natural frequency.
    """

    alpha1: float
    beta1: float
    nu1: float
    nu2: float
    eps: float
    S11_at_sqrt_alpha1: float
    S22_at_2sqrt_alpha1: float

    def __post_init__(self):
        if not self.alpha1 > 0.0:
            raise DomainError(f"alpha1 must be positive, got {self.alpha1}")
        if self.beta1 < 0.0:
            raise DomainError(f"beta1 must be >= 0, got {self.beta1}")
        if self.nu1 < 0.0 or self.nu2 < 0.0 or not (self.nu1 > 0.0 or self.nu2 > 0.0):
            raise DomainError(f"need nu1, nu2 >= 0 with one positive, got {self.nu1}, {self.nu2}")
        if self.S11_at_sqrt_alpha1 < 0.0 or self.S22_at_2sqrt_alpha1 < 0.0:
            raise DomainError("spectral densities must be non-negative")
        if not self.eps > 0.0:
            raise DomainError(f"eps must be positive, got {self.eps}")

    @classmethod
    def from_spectra(
        cls,
        alpha1: float,
        beta1: float,
        nu1: float,
        nu2: float,
        eps: float,
        spectrum1: SpectrumSpec,
        spectrum2: SpectrumSpec,
    ) -> "MathieuParams":
        root = math.sqrt(alpha1)
        return cls(
            alpha1=alpha1,
            beta1=beta1,
            nu1=nu1,
            nu2=nu2,
            eps=eps,
            S11_at_sqrt_alpha1=float(spectrum_value(spectrum1, root)),
            S22_at_2sqrt_alpha1=float(spectrum_value(spectrum2, 2.0 * root)),
        )

    @property
    def additive_strength(self) -> float:
        """pi nu1^2 S11(sqrt(alpha1))."""
        return math.pi * self.nu1**2 * self.S11_at_sqrt_alpha1

    @property
    def parametric_strength(self) -> float:
        """pi nu2^2 S22(2 sqrt(alpha1)) / alpha1."""
        return math.pi * self.nu2**2 * self.S22_at_2sqrt_alpha1 / self.alpha1


@dataclass(frozen=True)
class DuffingParams:
    """
    Softening Duffing oscillator

        x'' = -alpha1 x + alpha3 x^3 - eps (beta1 y + beta2 |y| y + beta3 y^3)
              + sqrt(eps) (nu1 xi1 + nu2 x xi2)

    with energy H = y^2/2 + alpha1 x^2/2 - alpha3 x^4/4. Oscillations stay inside
    the heteroclinic orbit for H < H_crit = alpha1^2 / (4 alpha3).
    """

    alpha1: float
    alpha3: float
    beta1: float
    beta2: float
    beta3: float
    nu1: float
    nu2: float
    eps: float

    def __post_init__(self):
        if not (self.alpha1 > 0.0 and self.alpha3 > 0.0):
            raise DomainError(f"need alpha1, alpha3 > 0, got {self.alpha1}, {self.alpha3}")
        if min(self.beta1, self.beta2, self.beta3) < 0.0:
            raise DomainError("damping coefficients must be non-negative")
        if self.nu1 < 0.0 or self.nu2 < 0.0:
            raise DomainError("noise intensities must be non-negative")
        if not self.eps >= 0.0:
            raise DomainError(f"eps must be >= 0, got {self.eps}")

    @classmethod
    def table1(cls) -> "DuffingParams":
        """Ship-roll reference set; pairs with H_c = 0.529 (b_c = 40 degrees)."""
        return cls(alpha1=3.187, alpha3=4.164, beta1=0.655, beta2=0.921, beta3=0.0, nu1=0.018, nu2=1.783, eps=0.1)

    @property
    def H_crit(self) -> float:
        return self.alpha1**2 / (4.0 * self.alpha3)

    @property
    def H_guard(self) -> float:
        """Upper end of the energy domain exposed by the averaged models."""
        return self.H_crit * (1.0 - H_CRIT_GUARD)

    @property
    def b_hetero(self) -> float:
        return math.sqrt(self.alpha1 / self.alpha3)

    @property
    def small_oscillation_period(self) -> float:
        return 2.0 * math.pi / math.sqrt(self.alpha1)

    def hamiltonian(self, x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        return 0.5 * y**2 + 0.5 * self.alpha1 * x**2 - 0.25 * self.alpha3 * x**4

    def q_function(self, x, H):
        """Q(x, H) = y^2 = 2H - alpha1 x^2 + alpha3 x^4 / 2."""
        x = np.asarray(x, dtype=float)
        return 2.0 * np.asarray(H, dtype=float) - self.alpha1 * x**2 + 0.5 * self.alpha3 * x**4

    def fixed_points(self) -> dict[str, tuple[float, float]]:
        return {"P1": (self.b_hetero, 0.0), "P2": (-self.b_hetero, 0.0), "S": (0.0, 0.0)}

    def in_domain(self, x, y):
        """Membership of the region bounded by the heteroclinic orbit."""
        x = np.asarray(x, dtype=float)
        return (np.abs(x) < self.b_hetero) & (self.hamiltonian(x, y) < self.H_crit)

    def amplitude(self, H):
        """Turning point b(H) of the orbit at energy H in [0, H_crit]."""
        H = np.asarray(H, dtype=float)
        if np.any(H < 0.0) or np.any(H > self.H_crit):
            raise DomainError(f"energy outside [0, {self.H_crit:.6g}]")
        root = np.sqrt(np.maximum(self.alpha1**2 - 4.0 * self.alpha3 * H, 0.0))
        b = np.sqrt(4.0 * H / (self.alpha1 + root))
        return float(b) if b.ndim == 0 else b

    def energy_from_amplitude(self, b):
        b = np.asarray(b, dtype=float)
        if np.any(np.abs(b) > self.b_hetero):
            raise DomainError(f"amplitude beyond the saddle points |b| <= {self.b_hetero:.6g}")
        H = 0.5 * self.alpha1 * b**2 - 0.25 * self.alpha3 * b**4
        return float(H) if H.ndim == 0 else H
