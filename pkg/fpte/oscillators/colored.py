"""
Energy diffusion of the Duffing oscillator under wide-band colored excitation.

With R1, R2 the autocorrelations of xi1, xi2 and v = q * lag,

    m(H) = 2 / (T q) int_0^inf [R1 nu1^2 F1(-q s) + R2 b^2 nu2^2 F2(-q s)] ds
           + <Q (-beta1 - beta2 sqrt(Q) - beta3 Q)>

    sigma^2(H) = 4 b^2 q / T int_0^inf [R1 nu1^2 (G1(qs) + G1(-qs))
                                       + R2 b^2 nu2^2 (G2(qs) + G2(-qs))] ds

where y(u) = cn(u) dn(u) and

    F1(v) = PV int_{-K}^{K} y(u + v) / y(u) du
    F2(v) = PV int_{-K}^{K} sn(u) sn(u + v) y(u + v) / y(u) du
    G1(v) = int_0^K y(u) y(u + v) du
    G2(v) = int_0^K sn(u) sn(u + v) y(u) y(u + v) du

The F integrands have period 2K in u and a simple pole at u = K. They are
folded about the pole,

    F(v) = int_0^K [g(K - w) + g(K + w)] dw,

so the pole cancels and plain Gauss-Legendre applies. Values of sn, cn, dn at
K -/+ w come from the reflection identities and shifted values from the
addition theorem, so each H needs one Jacobi evaluation per quadrature node.

F1, F2, G1 and G2 have period 4K in v. Each energy samples them once over one
period and pairs their Fourier coefficients with the lag transforms of R1 and R2
at the orbit harmonics (LagTransform), so the lag grid is swept once per
harmonic rather than once per Jacobi evaluation.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.interpolate import CubicSpline

from fpte.constants import (
    COEFF_TABLE_POINTS,
    KERNEL_DECAY_TOL,
    KERNEL_FINE_LEVELS,
    KERNEL_MAX_PERIODS,
    PERIOD_NODES,
    PERIOD_NODES_MAX,
    PERIOD_RTOL,
)
from fpte.diffusion.model import DiffusionModel
from fpte.errors import DomainError, IntegrabilityError
from fpte.noise.spectra import SpectrumSpec, WhiteCorrelation, autocorrelation_kernel
from fpte.numerics.quadrature import PanelGrid
from fpte.numerics.specfun import jacobi_elliptic
from fpte.oscillators.duffing import (
    DuffingGeometry,
    chebyshev_energies,
    duffing_damping_average,
    duffing_geometry,
    white_terms,
)
from fpte.oscillators.params import DuffingParams

logger = logging.getLogger(__name__)

Kernel = Union[SpectrumSpec, WhiteCorrelation, Callable[[np.ndarray], np.ndarray], None]

_LAG_ORDER = 8


@dataclass(frozen=True)
class _ResolvedKernel:
    function: Callable[[np.ndarray], np.ndarray] | None
    white: float = 0.0
    max_frequency: float = 0.0

    @property
    def active(self) -> bool:
        return self.function is not None


def _resolve_kernel(kernel: Kernel) -> _ResolvedKernel:
    if kernel is None:
        return _ResolvedKernel(None)
    if isinstance(kernel, WhiteCorrelation):
        return _ResolvedKernel(None, white=float(kernel.strength))
    if isinstance(kernel, SpectrumSpec):
        resolved = autocorrelation_kernel(kernel)
        if isinstance(resolved, WhiteCorrelation):
            return _ResolvedKernel(None, white=float(resolved.strength))
        top = float(kernel.omega[-1]) if kernel.kind == "tabulated" else kernel.center
        function = resolved
    elif callable(kernel):
        function, top = kernel, 0.0
    else:
        raise DomainError(f"unsupported correlation kernel {kernel!r}")
    r0 = float(np.asarray(function(np.zeros(1)), dtype=float)[0])
    if r0 == 0.0:
        return _ResolvedKernel(None)
    return _ResolvedKernel(function, max_frequency=top)


@dataclass(frozen=True)
class LagGrid:
    """Gauss-Legendre nodes and weights over [0, s_max] for the lag integrals."""

    nodes: np.ndarray
    weights: np.ndarray
    s_max: float


def _lag_breakpoints(period: float, upper: float, step: float) -> np.ndarray:
    fine = period * 2.0 ** -np.arange(KERNEL_FINE_LEVELS, -1, -1, dtype=float)
    count = int(math.ceil((upper - period) / step))
    coarse = period + step * np.arange(1, count + 1, dtype=float)
    return np.concatenate(([0.0], fine, coarse))


def lag_grid(kernels: list[_ResolvedKernel], period: float) -> LagGrid:
    """
    Lag quadrature shared by every energy in a table.

    The grid is geometric below one small-oscillation period and uniform above;
    it stops at the last sampled lag where some |R| still exceeds
    KERNEL_DECAY_TOL * R(0).

    Raises:
        IntegrabilityError: if a kernel has not decayed within KERNEL_MAX_PERIODS periods
    """
    step = period / 8.0
    top = max((k.max_frequency for k in kernels), default=0.0)
    if top > 0.0:
        step = min(step, math.pi / (4.0 * top))
    samples = _lag_breakpoints(period, KERNEL_MAX_PERIODS * period, step)
    last = 1
    for kernel in kernels:
        values = np.abs(np.asarray(kernel.function(samples), dtype=float))
        alive = np.flatnonzero(values >= KERNEL_DECAY_TOL * values[0])
        if alive[-1] == samples.size - 1:
            raise IntegrabilityError(
                f"correlation kernel above {KERNEL_DECAY_TOL:g} R(0) after {KERNEL_MAX_PERIODS} periods"
            )
        last = max(last, int(alive[-1]) + 1)
    grid = PanelGrid(samples[: last + 1], order=_LAG_ORDER)
    weights = grid.half[:, None] * grid.rule.weights[None, :]
    return LagGrid(grid.nodes.ravel(), weights.ravel(), float(samples[last]))


def _shift(su, cu, du, sv, cv, dv, k2):
    """sn, cn, dn of u + v from the values at u and at v."""
    den = 1.0 - k2 * su**2 * sv**2
    sn = (su * cv * dv + sv * cu * du) / den
    cn = (cu * cv - su * du * sv * dv) / den
    dn = (du * dv - k2 * su * cu * sv * cv) / den
    return sn, cn, dn


def fold_reflections(w, k, kc, center: str = "K"):
    """
    (sn, cn, dn) at center - w and center + w for center K or 3K.

    With cd = cn/dn, sd = sn/dn, nd = 1/dn evaluated at w.
    """
    sn, cn, dn = (np.asarray(v, dtype=float) for v in jacobi_elliptic(w, k, kc))
    cd, sd, nd = cn / dn, sn / dn, 1.0 / dn
    if center == "K":
        return (cd, kc * sd, kc * nd), (cd, -kc * sd, kc * nd)
    if center == "3K":
        return (-cd, -kc * sd, kc * nd), (-cd, kc * sd, kc * nd)
    raise DomainError(f"fold centre must be 'K' or '3K', got {center!r}")


def folded_drift_integrals(g: DuffingGeometry, v: np.ndarray, nodes: int, center: str = "K"):
    """F1(v) and F2(v) at a scalar energy for an array of shifts v."""
    k, kc, K = float(g.k), float(g.kc), float(g.K)
    x, w = np.polynomial.legendre.leggauss(nodes)
    offsets = 0.5 * K * (x + 1.0)
    weights = 0.5 * K * w
    below, above = fold_reflections(offsets, k, kc, center)
    pole = below[1] * below[2]  # y(c - w) = -y(c + w)
    sv, cv, dv = (np.asarray(t, dtype=float)[:, None] for t in jacobi_elliptic(v, k, kc))
    k2 = k * k
    s_lo, c_lo, d_lo = _shift(*below, sv, cv, dv, k2)
    s_hi, c_hi, d_hi = _shift(*above, sv, cv, dv, k2)
    y_lo, y_hi = c_lo * d_lo, c_hi * d_hi
    F1 = ((y_lo - y_hi) / pole) @ weights
    F2 = ((below[0] * s_lo * y_lo - above[0] * s_hi * y_hi) / pole) @ weights
    return F1, F2


def correlation_integrals(g: DuffingGeometry, v: np.ndarray, nodes: int):
    """G1(v) and G2(v) at a scalar energy for an array of shifts v."""
    k, kc, K = float(g.k), float(g.kc), float(g.K)
    x, w = np.polynomial.legendre.leggauss(nodes)
    weights = 0.5 * K * w
    su, cu, du = (np.asarray(t, dtype=float) for t in jacobi_elliptic(0.5 * K * (x + 1.0), k, kc))
    sv, cv, dv = (np.asarray(t, dtype=float)[:, None] for t in jacobi_elliptic(v, k, kc))
    s, c, d = _shift(su, cu, du, sv, cv, dv, k * k)
    yy = cu * du * c * d
    return (yy @ weights), ((su * s * yy) @ weights)


class LagTransform:
    """
    Phi_n = sum_j w_j R(s_j) exp(-i n omega s_j) for both excitation channels.

    Harmonics are added on demand by repeated multiplication with
    exp(-i omega s_j).
    """

    def __init__(self, lags: LagGrid, weighted: np.ndarray, omega: float):
        self._base = np.exp(-1j * omega * lags.nodes)
        self._power = np.ones_like(self._base)
        self._weighted = weighted
        self.values = np.empty((0, weighted.shape[1]), dtype=complex)

    def upto(self, count: int) -> np.ndarray:
        missing = count - self.values.shape[0]
        if missing > 0:
            extra = np.empty((missing, self._weighted.shape[1]), dtype=complex)
            for i in range(missing):
                extra[i] = self._power @ self._weighted
                self._power *= self._base
            self.values = np.concatenate((self.values, extra))
        return self.values[:count]


def _fourier_coefficients(samples: np.ndarray, count: int) -> np.ndarray:
    """c_n, n < count, of f(v) = sum c_n exp(2 pi i n v / period) from equispaced samples."""
    return np.fft.rfft(samples)[:count] / samples.size


def _harmonic_sum(coeffs: np.ndarray, phi: np.ndarray) -> float:
    """sum over all integers n of c_n phi_n, with c_-n and phi_-n the conjugates."""
    return float(np.real(coeffs[0] * phi[0]) + 2.0 * np.real(np.sum(coeffs[1:] * phi[1:])))


def _noise_terms(g: DuffingGeometry, p: DuffingParams, transform: LagTransform, nodes: int):
    """
    Colored contributions to (m, sigma^2 / H) at one energy.

    F and G have period 4K in the shift, so with v = q s their lag integrals
    reduce to sums over the orbit harmonics n omega, omega = pi q / (2K).
    ``nodes`` sets both the quadrature order in u and the number of shift samples.
    """
    q, T, K = float(g.q), float(g.T), float(g.K)
    b2 = float(g.b) ** 2
    harmonics = nodes // 2
    phi = transform.upto(harmonics)
    phi1 = phi[:, 0] * p.nu1**2
    phi2 = phi[:, 1] * b2 * p.nu2**2

    v = 4.0 * K * np.arange(nodes, dtype=float) / nodes
    F1, F2 = folded_drift_integrals(g, v, nodes)
    G1, G2 = correlation_integrals(g, v, nodes)
    f1, f2, g1, g2 = (_fourier_coefficients(values, harmonics) for values in (F1, F2, G1, G2))

    # F is taken at -q s, G at +q s and -q s
    drift = _harmonic_sum(f1, phi1) + _harmonic_sum(f2, phi2)
    spread = (
        _harmonic_sum(g1, phi1)
        + _harmonic_sum(g1, phi1.conj())
        + _harmonic_sum(g2, phi2)
        + _harmonic_sum(g2, phi2.conj())
    )
    return 2.0 / (T * q) * drift, 4.0 * float(g.b_sq_over_H) * q / T * spread


def _white_terms(g: DuffingGeometry, p: DuffingParams, R1: _ResolvedKernel, R2: _ResolvedKernel):
    """Delta-correlated parts of (m, sigma^2 / H); B1/H -> 1, B2/H -> 0 at H = 0."""
    if R1.white == 0.0 and R2.white == 0.0:
        return 0.0, 0.0
    B1, B2, _, D = (float(v) for v in white_terms(g))
    H = float(g.H)
    drift = 0.5 * R1.white * p.nu1**2 + 0.5 * R2.white * p.nu2**2 * float(g.a) ** 2 * D
    if H > 0.0:
        spread = (R1.white * p.nu1**2 * B1 + R2.white * p.nu2**2 * B2) / H
    else:
        spread = R1.white * p.nu1**2
    return drift, spread


def _energy_coefficients(H: float, p: DuffingParams, lags: LagGrid | None, weighted: np.ndarray | None, R1, R2):
    g = duffing_geometry(H, p)
    drift, spread = _white_terms(g, p, R1, R2)
    drift += float(duffing_damping_average(H, p))
    if lags is None:
        return drift, spread
    transform = LagTransform(lags, weighted, math.pi * float(g.q) / (2.0 * float(g.K)))
    n = PERIOD_NODES
    colored = _noise_terms(g, p, transform, n)
    while n < PERIOD_NODES_MAX:
        n *= 2
        refined = _noise_terms(g, p, transform, n)
        change = max(abs(a - b) / max(abs(b), 1e-300) for a, b in zip(colored, refined))
        colored = refined
        if change <= PERIOD_RTOL:
            break
    else:
        logger.warning(f"colored coefficients at H={H:.6g}: not converged with {PERIOD_NODES_MAX} nodes")
    return drift + colored[0], spread + colored[1]


@dataclass(frozen=True, eq=False)
class CoefficientTable:
    """Drift and sigma^2 / H of the energy process on Chebyshev-Lobatto energies."""

    energies: np.ndarray
    drift: np.ndarray
    sigma_sq_over_H: np.ndarray
    lag_cutoff: float

    @property
    def sigma_sq(self) -> np.ndarray:
        return self.energies * self.sigma_sq_over_H


def duffing_colored_table(
    p: DuffingParams,
    R1: Kernel,
    R2: Kernel,
    points: int = COEFF_TABLE_POINTS,
    threads: int = 1,
) -> CoefficientTable:
    """
    Tabulate the colored-noise coefficients on [0, H_guard].

    R1 and R2 may each be a SpectrumSpec, a vectorized R(s), a WhiteCorrelation
    or None. Energies are processed by up to ``threads`` workers; results do not
    depend on the worker count.
    """
    kernels = [_resolve_kernel(R1), _resolve_kernel(R2)]
    active = [k for k in kernels if k.active]
    lags = lag_grid(active, p.small_oscillation_period) if active else None
    weighted = None
    if lags is not None:
        columns = [k.function(lags.nodes) if k.active else np.zeros_like(lags.nodes) for k in kernels]
        weighted = np.column_stack(columns) * lags.weights[:, None]
    energies = chebyshev_energies(p.H_guard, points)

    def work(H: float):
        return _energy_coefficients(float(H), p, lags, weighted, *kernels)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(work, energies))
    else:
        rows = [work(H) for H in energies]
    drift, spread = (np.array(column) for column in zip(*rows))
    if np.any(~np.isfinite(drift)) or np.any(~np.isfinite(spread)):
        raise IntegrabilityError("colored-noise coefficients are not finite")
    cutoff = lags.s_max if lags is not None else 0.0
    logger.info(f"Tabulated colored coefficients on {points} energies (lag cutoff {cutoff:.4g})")
    return CoefficientTable(energies, drift, spread, cutoff)


def duffing_colored_model(
    p: DuffingParams,
    R1: Kernel,
    R2: Kernel,
    points: int = COEFF_TABLE_POINTS,
    threads: int = 1,
) -> DiffusionModel:
    """Energy diffusion on (0, H_guard) with cubic-spline coefficients; sigma^2 = H * spline."""
    table = duffing_colored_table(p, R1, R2, points=points, threads=threads)
    drift_spline = CubicSpline(table.energies, table.drift)
    spread_spline = CubicSpline(table.energies, table.sigma_sq_over_H)

    def drift(H):
        return drift_spline(H)

    def diffusion_sq(H):
        H = np.asarray(H, dtype=float)
        return H * spread_spline(H)

    model = DiffusionModel(drift, diffusion_sq, 0.0, p.H_guard, name="duffing-colored")
    model.cached("coefficient_table", lambda: table)
    return model
