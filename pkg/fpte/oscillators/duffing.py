"""
Unperturbed Duffing orbits and the white-noise energy model.

For 0 <= H < H_crit the orbit is x = b sn(qt, k), y = b q cn(qt, k) dn(qt, k)
with b^2 the smaller and a^2 the larger root of Q(x, H) = 0 in x^2, q = a
sqrt(alpha3 / 2), k = b / a and period T = 4 K(k) / q. b^2 is formed as
4H / (alpha1 + sqrt(alpha1^2 - 4 alpha3 H)) and k'^2 from the root directly, so
neither loses digits at the ends of the energy range.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from fpte.constants import COEFF_TABLE_POINTS, PERIOD_NODES, PERIOD_NODES_MAX, PERIOD_RTOL
from fpte.diffusion.model import DiffusionModel
from fpte.errors import DomainError
from fpte.numerics.specfun import complete_elliptic_K, elliptic_deficit, jacobi_elliptic
from fpte.oscillators.params import DuffingParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DuffingGeometry:
    """Orbit constants at one energy or a vector of energies."""

    H: np.ndarray | float
    b: np.ndarray | float
    a: np.ndarray | float
    q: np.ndarray | float
    k: np.ndarray | float
    kc: np.ndarray | float
    K: np.ndarray | float
    T: np.ndarray | float
    b_sq_over_H: np.ndarray | float

    @property
    def deficit(self):
        """1 - E(k)/K(k)."""
        return elliptic_deficit(self.k, self.kc)


def _out(values):
    values = np.asarray(values, dtype=float)
    return float(values) if values.ndim == 0 else values


def duffing_geometry(H, p: DuffingParams) -> DuffingGeometry:
    """
    Amplitude, modulus, frequency and period of the orbit at energy H.

    Raises:
        DomainError: for H < 0 or H >= H_crit
    """
    H = np.asarray(H, dtype=float)
    if np.any(~np.isfinite(H)) or np.any(H < 0.0) or np.any(H >= p.H_crit):
        raise DomainError(f"energy must lie in [0, {p.H_crit:.6g}), got {H}")
    root = np.sqrt(p.alpha1**2 - 4.0 * p.alpha3 * H)
    b_sq_over_H = 4.0 / (p.alpha1 + root)
    b_sq = H * b_sq_over_H
    a_sq = (p.alpha1 + root) / p.alpha3
    a = np.sqrt(a_sq)
    b = np.sqrt(b_sq)
    q = a * math.sqrt(0.5 * p.alpha3)
    k = b / a
    kc = np.sqrt(2.0 * root / (p.alpha3 * a_sq))
    K = np.asarray(complete_elliptic_K(k, kc))
    T = 4.0 * K / q
    return DuffingGeometry(
        H=_out(H),
        b=_out(b),
        a=_out(a),
        q=_out(q),
        k=_out(k),
        kc=_out(kc),
        K=_out(K),
        T=_out(T),
        b_sq_over_H=_out(b_sq_over_H),
    )


def duffing_orbit(t, H: float, p: DuffingParams) -> tuple[np.ndarray, np.ndarray]:
    """(x(t), y(t)) of the unperturbed orbit through (0, sqrt(2H))."""
    g = duffing_geometry(H, p)
    sn, cn, dn = jacobi_elliptic(g.q * np.asarray(t, dtype=float), g.k, g.kc)
    return g.b * np.asarray(sn), g.b * g.q * np.asarray(cn) * np.asarray(dn)


def quarter_period_average(function, g: DuffingGeometry, what: str = "period average") -> np.ndarray:
    """
    (1/K) int_0^K f(sn, cn, dn) du by Gauss-Legendre, doubling the node count
    until the relative change drops below PERIOD_RTOL.

    ``function`` receives sn, cn, dn with shape (..., nodes) broadcast against the
    geometry arrays.
    """
    K = np.asarray(g.K, dtype=float)[..., None]
    k = np.asarray(g.k, dtype=float)[..., None]
    kc = np.asarray(g.kc, dtype=float)[..., None]

    def evaluate(n: int) -> np.ndarray:
        x, w = np.polynomial.legendre.leggauss(n)
        sn, cn, dn = jacobi_elliptic(0.5 * K * (x + 1.0), k, kc)
        return 0.5 * np.asarray(function(sn, cn, dn)) @ w

    n = PERIOD_NODES
    value = evaluate(n)
    while n < PERIOD_NODES_MAX:
        n *= 2
        refined = evaluate(n)
        change = np.abs(refined - value)
        value = refined
        if np.all(change <= PERIOD_RTOL * np.maximum(np.abs(value), 1e-300)):
            return value
    logger.warning(f"{what}: not converged with {PERIOD_NODES_MAX} nodes")
    return value


def duffing_damping_average(H, p: DuffingParams):
    """
    Period average of Q (-beta1 - beta2 sqrt(Q) - beta3 Q) along the orbit at H,
    with sqrt(Q) = b q cn dn = sqrt(2H) cn dn.
    """
    g = duffing_geometry(H, p)
    two_H = 2.0 * np.asarray(g.H, dtype=float)[..., None]

    def integrand(sn, cn, dn):
        root_q = np.sqrt(two_H) * cn * dn
        Q = root_q**2
        return Q * (-p.beta1 - p.beta2 * np.abs(root_q) - p.beta3 * Q)

    return _out(quarter_period_average(integrand, g, "damping average"))


def _abs_cube_average(H, p: DuffingParams) -> np.ndarray:
    """(1/K) int_0^K |cn dn|^3 du."""
    g = duffing_geometry(H, p)
    return quarter_period_average(lambda sn, cn, dn: np.abs(cn * dn) ** 3, g, "beta2 average")


def white_terms(g: DuffingGeometry):
    """
    Closed-form period averages B1 = <Q>, B2 = <Q x^2>, B3 = <Q x^4> and the
    deficit D = 1 - E/K, written without the cancellation in 1 - E/K.
    """
    a2 = np.asarray(g.a, dtype=float) ** 2
    b2 = np.asarray(g.b, dtype=float) ** 2
    q2 = np.asarray(g.q, dtype=float) ** 2
    D = np.asarray(g.deficit, dtype=float)
    B1 = q2 / 3.0 * (2.0 * b2 - (a2 + b2) * D)
    B2 = q2 / 15.0 * (a2 * b2 + b2**2 - (2.0 * a2**2 + 2.0 * b2**2 - 2.0 * a2 * b2) * D)
    B3 = q2 / 105.0 * (
        4.0 * b2 * a2**2
        - 2.0 * b2**2 * a2
        + 4.0 * b2**3
        - (8.0 * a2**3 + 8.0 * b2**3 - 5.0 * b2 * a2**2 - 5.0 * b2**2 * a2) * D
    )
    return B1, B2, B3, D


def duffing_white_coefficients(H, p: DuffingParams, beta2_average=None):
    """
    Drift m(H) = B + C and squared diffusion sigma^2(H) = nu1^2 B1 + nu2^2 B2 of
    the energy under white excitation.

    ``beta2_average`` maps H to <|cn dn|^3>; it defaults to direct quadrature.

    Raises:
        DomainError: beyond the guard band below H_crit
    """
    H = np.asarray(H, dtype=float)
    if np.any(H > p.H_guard):
        raise DomainError(f"energy beyond the guard band {p.H_guard:.9g}")
    g = duffing_geometry(H, p)
    B1, B2, B3, D = white_terms(g)
    a2 = np.asarray(g.a, dtype=float) ** 2
    B = -(p.beta1 + 2.0 * p.beta3 * H) * B1 + p.alpha1 * p.beta3 * B2 - 0.5 * p.alpha3 * p.beta3 * B3
    C = 0.5 * p.nu1**2 + 0.5 * p.nu2**2 * a2 * D
    drift = B + C
    if p.beta2 != 0.0:
        average = _abs_cube_average(H, p) if beta2_average is None else beta2_average(H)
        drift = drift - p.beta2 * (2.0 * H) ** 1.5 * average
    sigma_sq = p.nu1**2 * B1 + p.nu2**2 * B2
    return _out(drift), _out(sigma_sq)


def chebyshev_energies(upper: float, points: int = COEFF_TABLE_POINTS) -> np.ndarray:
    """Chebyshev-Lobatto nodes on [0, upper], ascending, both ends included."""
    j = np.arange(points)
    nodes = 0.5 * upper * (1.0 - np.cos(np.pi * j / (points - 1)))
    nodes[0], nodes[-1] = 0.0, upper
    return nodes


def duffing_white_model(p: DuffingParams) -> DiffusionModel:
    """
    Energy diffusion on (0, H_guard) under white excitation.

    The beta2 |y| y damping has no closed form; its orbit average is tabulated
    on Chebyshev nodes and splined.
    """
    if p.nu1 <= 0.0 and p.nu2 <= 0.0:
        raise DomainError("white-noise energy model needs nu1 > 0 or nu2 > 0")
    beta2_average = None
    if p.beta2 != 0.0:
        energies = chebyshev_energies(p.H_guard)
        beta2_average = CubicSpline(energies, _abs_cube_average(energies, p))

    def drift(H):
        return duffing_white_coefficients(H, p, beta2_average)[0]

    def diffusion_sq(H):
        return duffing_white_coefficients(H, p, beta2_average)[1]

    return DiffusionModel(drift, diffusion_sq, 0.0, p.H_guard, name="duffing-white")
