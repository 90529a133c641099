"""
Gaussian sample paths by harmonic superposition.

The one-sided spectral energy is split into HARMONICS equal-energy bins; one
frequency is drawn inside each bin by inverse-CDF sampling and carries amplitude
sqrt(2 var / N_h) and a uniform random phase. Paths are evaluated in blocks as
Re(E @ c) with E[j, h] = exp(i w_h j dt).
"""

from __future__ import annotations

import logging
import math

import numpy as np

from fpte.constants import HARMONICS, SYNTH_BLOCK
from fpte.errors import DomainError
from fpte.noise.spectra import SpectrumSpec, spectral_variance

logger = logging.getLogger(__name__)

_BISECTION_STEPS = 200


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    """Counter-based generator for (seed, stream...)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, stream)])))


def _cumulative_energy(spec: SpectrumSpec, w: np.ndarray) -> np.ndarray:
    """int_0^w S for w >= 0."""
    if spec.kind == "exponential_cosine":
        lam, center = spec.decay, spec.center
        return spec.variance / (2.0 * math.pi) * (
            np.arctan((w - center) / lam)
            + np.arctan(center / lam)
            + np.arctan((w + center) / lam)
            - np.arctan(center / lam)
        )
    grid, values = spec.omega, spec.values
    segment = np.diff(grid) * 0.5 * (values[:-1] + values[1:])
    at_nodes = np.concatenate(([0.0], np.cumsum(segment)))
    idx = np.clip(np.searchsorted(grid, w, side="right") - 1, 0, grid.size - 2)
    t = np.clip(w - grid[idx], 0.0, grid[idx + 1] - grid[idx])
    slope = (values[idx + 1] - values[idx]) / (grid[idx + 1] - grid[idx])
    partial = values[idx] * t + 0.5 * slope * t * t
    return np.where(w < grid[0], 0.0, at_nodes[idx] + partial)


def _inverse_energy(spec: SpectrumSpec, targets: np.ndarray) -> np.ndarray:
    """Vectorized bisection for w with int_0^w S = target."""
    lo = np.zeros_like(targets)
    if spec.kind == "tabulated":
        hi = np.full_like(targets, spec.omega[-1])
    else:
        hi = np.full_like(targets, 2.0 * max(spec.center, spec.decay))
        for _ in range(1100):
            short = _cumulative_energy(spec, hi) < targets
            if not short.any():
                break
            hi = np.where(short, 2.0 * hi, hi)
    for _ in range(_BISECTION_STEPS):
        mid = 0.5 * (lo + hi)
        below = _cumulative_energy(spec, mid) < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if np.all(hi - lo <= 4.0 * np.finfo(float).eps * np.maximum(hi, 1e-300)):
            break
    return 0.5 * (lo + hi)


class HarmonicSource:
    """
    Shared harmonic frequencies with per-path phases.

    Args:
        spec: Non-white spectrum
        dt: Sampling step
        n_paths: Number of independent paths
        seed: Seed; frequencies come from stream 0, phases from stream 1
        harmonics: Number of equal-energy bins
    """

    def __init__(self, spec: SpectrumSpec, dt: float, n_paths: int, seed: int, harmonics: int = HARMONICS):
        if spec.is_white:
            raise DomainError("white noise is generated as increments, not by harmonic synthesis")
        if not dt > 0.0:
            raise DomainError(f"dt must be positive, got {dt}")
        self.dt = float(dt)
        self.n_paths = int(n_paths)
        variance = spectral_variance(spec)
        energy = 0.5 * variance

        quantiles = (np.arange(harmonics) + make_rng(seed, 0).random(harmonics)) / harmonics
        self.frequencies = _inverse_energy(spec, quantiles * energy) if energy > 0.0 else np.zeros(harmonics)
        self.amplitude = math.sqrt(2.0 * variance / harmonics)
        self.phases = make_rng(seed, 1).uniform(0.0, 2.0 * math.pi, size=(self.n_paths, harmonics))

        offsets = np.arange(SYNTH_BLOCK) * self.dt
        self._block = np.exp(1j * np.outer(offsets, self.frequencies))
        logger.debug(
            f"Harmonic source: {harmonics} harmonics in [{self.frequencies.min():.4g}, "
            f"{self.frequencies.max():.4g}], variance {variance:.6g}"
        )

    def block(self, start: int, length: int) -> np.ndarray:
        """Samples start..start+length-1 of every path, shape (n_paths, length)."""
        out = np.empty((self.n_paths, length))
        done = 0
        while done < length:
            size = min(SYNTH_BLOCK, length - done)
            t0 = (start + done) * self.dt
            coeffs = self.amplitude * np.exp(1j * (self.frequencies * t0 + self.phases))  # (paths, h)
            out[:, done:done + size] = (self._block[:size] @ coeffs.T).real.T
            done += size
        return out


def spectral_paths(spec: SpectrumSpec, dt: float, n: int, n_paths: int, seed: int) -> np.ndarray:
    """Independent zero-mean Gaussian paths, shape (n_paths, n)."""
    if n < 2:
        raise DomainError(f"need at least two samples, got {n}")
    return HarmonicSource(spec, dt, n_paths, seed).block(0, n)


def synthesize_realization(spec: SpectrumSpec, dt: float, n: int, seed: int) -> np.ndarray:
    """One path of n samples at spacing dt; identical for identical seeds."""
    return spectral_paths(spec, dt, n, 1, seed)[0]
