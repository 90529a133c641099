"""
Spectral densities of stationary excitation processes.

Convention: S(w) = (1/2pi) int R(s) e^{iws} ds, so S is even in w and

    R(s) = 2 int_0^inf S(w) cos(ws) dw,    R(0) = variance.

Tabulated spectra are given on w >= 0, interpolated linearly and zero outside
their grid.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal

import numpy as np

from fpte.errors import DomainError

logger = logging.getLogger(__name__)

SpectrumKind = Literal["white", "tabulated", "exponential_cosine"]

_SMALL_PHASE = 0.1


@dataclass(frozen=True)
class WhiteCorrelation:
    """Marker for R(s) = strength * delta(s); strength = 2 pi S0."""

    strength: float


@dataclass(frozen=True, eq=False)
class SpectrumSpec:
    """
    One of three spectrum families.

    white: constant ``intensity`` S0. tabulated: ``omega`` grid (strictly
    increasing, >= 0) with ``values``. exponential_cosine: ``variance``,
    ``decay`` and ``center`` of R(s) = v e^{-lambda |s|} cos(Omega s).
    """

    kind: SpectrumKind
    intensity: float = 0.0
    omega: np.ndarray = field(default_factory=lambda: np.empty(0))
    values: np.ndarray = field(default_factory=lambda: np.empty(0))
    variance: float = 0.0
    decay: float = 0.0
    center: float = 0.0

    @classmethod
    def white(cls, intensity: float) -> "SpectrumSpec":
        if not (np.isfinite(intensity) and intensity >= 0.0):
            raise DomainError(f"white-noise intensity must be >= 0, got {intensity}")
        return cls("white", intensity=float(intensity))

    @classmethod
    def tabulated(cls, omega, values) -> "SpectrumSpec":
        omega = np.asarray(omega, dtype=float)
        values = np.asarray(values, dtype=float)
        if omega.ndim != 1 or omega.shape != values.shape or omega.size < 2:
            raise DomainError("tabulated spectrum needs two equal-length columns with at least two rows")
        if np.any(~np.isfinite(omega)) or np.any(~np.isfinite(values)):
            raise DomainError("tabulated spectrum contains non-finite entries")
        if omega[0] < 0.0 or np.any(np.diff(omega) <= 0.0):
            raise DomainError("tabulated frequencies must be >= 0 and strictly increasing")
        if np.any(values < 0.0):
            raise DomainError("spectral density must be non-negative")
        return cls("tabulated", omega=omega, values=values)

    @classmethod
    def exponential_cosine(cls, variance: float, decay: float, center: float) -> "SpectrumSpec":
        if not (variance >= 0.0 and decay > 0.0 and center >= 0.0):
            raise DomainError(
                f"exponential-cosine spectrum needs variance >= 0, decay > 0, center >= 0; "
                f"got {variance}, {decay}, {center}"
            )
        return cls("exponential_cosine", variance=float(variance), decay=float(decay), center=float(center))

    @property
    def is_white(self) -> bool:
        return self.kind == "white"

    def describe(self) -> dict:
        if self.kind == "white":
            return {"kind": self.kind, "intensity": self.intensity}
        if self.kind == "tabulated":
            return {"kind": self.kind, "points": int(self.omega.size)}
        return {"kind": self.kind, "variance": self.variance, "decay": self.decay, "center": self.center}


def _scalar(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def spectrum_value(spec: SpectrumSpec, omega):
    """S(w) >= 0; even in w."""
    w = np.abs(np.asarray(omega, dtype=float))
    if spec.kind == "white":
        out = np.full(w.shape, spec.intensity)
    elif spec.kind == "tabulated":
        out = np.interp(w, spec.omega, spec.values, left=0.0, right=0.0)
    else:
        lam, center = spec.decay, spec.center
        out = spec.variance / (2.0 * math.pi) * (
            lam / (lam**2 + (w - center) ** 2) + lam / (lam**2 + (w + center) ** 2)
        )
    return _scalar(out)


def spectral_variance(spec: SpectrumSpec) -> float:
    """R(0); infinite for white noise."""
    if spec.kind == "white":
        return math.inf
    if spec.kind == "tabulated":
        return float(2.0 * np.trapezoid(spec.values, spec.omega))
    return spec.variance


def _tabulated_autocorrelation(spec: SpectrumSpec, s: np.ndarray) -> np.ndarray:
    lags = np.abs(s).reshape(-1, 1)
    w0, w1 = spec.omega[:-1], spec.omega[1:]
    f0, f1 = spec.values[:-1], spec.values[1:]
    width = w1 - w0
    slope = (f1 - f0) / width

    with np.errstate(divide="ignore", invalid="ignore"):
        sin1, sin0 = np.sin(w1 * lags), np.sin(w0 * lags)
        cos1, cos0 = np.cos(w1 * lags), np.cos(w0 * lags)
        closed = (f1 * sin1 - f0 * sin0) / lags + slope * (cos1 - cos0) / lags**2

    nodes, weights = np.polynomial.legendre.leggauss(8)
    points = 0.5 * (w0 + w1)[:, None] + 0.5 * width[:, None] * nodes  # (K, 8)
    linear = 0.5 * (f0 + f1)[:, None] + 0.5 * (f1 - f0)[:, None] * nodes
    gauss = 0.5 * width * np.einsum("kq,mkq,q->mk", linear, np.cos(lags[:, :, None] * points[None]), weights)

    small = lags * width < _SMALL_PHASE
    segments = np.where(small, gauss, closed)
    return 2.0 * segments.sum(axis=1).reshape(s.shape)


def autocorrelation(spec: SpectrumSpec, s):
    """
    R(s) for a finite lag s; even in s.

    White noise has no pointwise autocorrelation and returns the WhiteCorrelation
    marker instead.
    """
    if spec.kind == "white":
        return WhiteCorrelation(2.0 * math.pi * spec.intensity)
    s = np.asarray(s, dtype=float)
    if np.any(~np.isfinite(s)):
        raise DomainError("autocorrelation lag must be finite")
    if spec.kind == "tabulated":
        out = _tabulated_autocorrelation(spec, s)
    else:
        out = spec.variance * np.exp(-spec.decay * np.abs(s)) * np.cos(spec.center * s)
    return _scalar(out)


def autocorrelation_kernel(spec: SpectrumSpec) -> Callable[[np.ndarray], np.ndarray] | WhiteCorrelation:
    """Vectorized R(s), or the WhiteCorrelation marker for white noise."""
    if spec.kind == "white":
        return WhiteCorrelation(2.0 * math.pi * spec.intensity)
    return lambda s: np.asarray(autocorrelation(spec, s), dtype=float)


def load_tabulated_spectrum(path: str | Path) -> SpectrumSpec:
    """
    Read a two-column (w, S) text file; '#' starts a comment.

    Units are rad/time for w and state^2 * time for S.
    """
    path = Path(path)
    table = np.loadtxt(path, comments="#", ndmin=2)
    if table.shape[1] != 2:
        raise DomainError(f"{path}: expected two columns, found {table.shape[1]}")
    spec = SpectrumSpec.tabulated(table[:, 0], table[:, 1])
    logger.info(f"Loaded tabulated spectrum {path} ({table.shape[0]} points, variance {spectral_variance(spec):.6g})")
    return spec
