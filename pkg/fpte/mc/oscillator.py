"""
First passage of the full Duffing oscillator through an energy level.

The oscillator is integrated with a kick-drift-kick Stormer-Verlet step. White
excitation enters as an Ito impulse in the first half kick; colored excitation
is sampled from harmonic sources at the step times.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from fpte.constants import HARMONICS, MC_BLOCK_PATHS, MC_CHUNK_STEPS, OSCILLATOR_STEPS_PER_PERIOD
from fpte.errors import DomainError
from fpte.mc.simulate import FptStats, resolve_t_cap
from fpte.noise.spectra import SpectrumSpec, autocorrelation
from fpte.noise.synthesis import HarmonicSource, make_rng
from fpte.oscillators.params import DuffingParams

logger = logging.getLogger(__name__)


def _acceleration(p: DuffingParams, x, y, forcing1, forcing2):
    damping = p.beta1 * y + p.beta2 * np.abs(y) * y + p.beta3 * y**3
    noise = p.nu1 * forcing1 + p.nu2 * x * forcing2
    return -p.alpha1 * x + p.alpha3 * x**3 - p.eps * damping + math.sqrt(p.eps) * noise


def verlet_energy_trace(p: DuffingParams, H0: float, dt: float, n_steps: int) -> np.ndarray:
    """Energy after each noise-free step from (0, sqrt(2 H0)); used to audit the integrator."""
    if not 0.0 <= H0 < p.H_crit:
        raise DomainError(f"initial energy {H0} outside [0, {p.H_crit:.6g})")
    x, y = 0.0, math.sqrt(2.0 * H0)
    energies = np.empty(n_steps)
    for n in range(n_steps):
        y += 0.5 * dt * _acceleration(p, x, y, 0.0, 0.0)
        x += dt * y
        y += 0.5 * dt * _acceleration(p, x, y, 0.0, 0.0)
        energies[n] = p.hamiltonian(x, y)
    return energies


class _Excitation:
    """Per-block source of (xi1, xi2) samples or white impulses."""

    def __init__(self, spec: SpectrumSpec, dt: float, size: int, seed: int, block: int, channel: int, harmonics: int):
        self.white = spec.is_white
        if self.white:
            strength = autocorrelation(spec, 0.0).strength
            self.scale = math.sqrt(strength * dt)
            self.rng = make_rng(seed, block, channel)
            self.source = None
        else:
            stream_seed = int(make_rng(seed, block, channel).integers(2**62))
            self.source = HarmonicSource(spec, dt, size, stream_seed, harmonics)

    def chunk(self, start: int, length: int, size: int) -> np.ndarray:
        """White: impulses (length, size). Colored: samples (length + 1, size) at steps start..start+length."""
        if self.white:
            return self.scale * self.rng.standard_normal((length, size))
        return self.source.block(start, length + 1).T


def _simulate_block(p, spec1, spec2, H0, H_c, dt, size, max_steps, seed, block, harmonics) -> np.ndarray:
    first = _Excitation(spec1, dt, size, seed, block, 1, harmonics)
    second = _Excitation(spec2, dt, size, seed, block, 2, harmonics)
    times = np.full(size, np.nan)
    x = np.zeros(size)
    y = np.full(size, math.sqrt(2.0 * H0))
    energy = np.full(size, H0)
    alive = np.arange(size)
    step = 0
    sqrt_eps = math.sqrt(p.eps)
    while alive.size and step < max_steps:
        chunk = min(MC_CHUNK_STEPS, max_steps - step)
        xi1 = first.chunk(step, chunk, size)
        xi2 = second.chunk(step, chunk, size)
        for i in range(chunk):
            if not alive.size:
                break
            xa, ya = x[alive], y[alive]
            f1_now = 0.0 if first.white else xi1[i, alive]
            f2_now = 0.0 if second.white else xi2[i, alive]
            ya = ya + 0.5 * dt * _acceleration(p, xa, ya, f1_now, f2_now)
            if first.white:
                ya = ya + sqrt_eps * p.nu1 * xi1[i, alive]
            if second.white:
                ya = ya + sqrt_eps * p.nu2 * xa * xi2[i, alive]
            xa = xa + dt * ya
            f1_next = 0.0 if first.white else xi1[i + 1, alive]
            f2_next = 0.0 if second.white else xi2[i + 1, alive]
            ya = ya + 0.5 * dt * _acceleration(p, xa, ya, f1_next, f2_next)

            new_energy = p.hamiltonian(xa, ya)
            old_energy = energy[alive]
            hit = new_energy > H_c
            fraction = (H_c - old_energy[hit]) / (new_energy[hit] - old_energy[hit])
            times[alive[hit]] = (step + i + np.clip(fraction, 0.0, 1.0)) * dt
            x[alive], y[alive], energy[alive] = xa, ya, new_energy
            alive = alive[~hit]
        step += chunk
    return times


def simulate_duffing_fpt(
    p: DuffingParams,
    spec1: SpectrumSpec,
    spec2: SpectrumSpec,
    H0: float,
    H_c: float,
    dt: float | None = None,
    n_paths: int = 1_000,
    t_cap: float | None = None,
    seed: int = 0,
    harmonics: int = HARMONICS,
    m1_hint: float | None = None,
    threads: int = 1,
) -> FptStats:
    """
    Time, in original t units, for H(x, y) to first exceed H_c from (0, sqrt(2 H0)).

    Raises:
        DomainError: unless 0 <= H0 and 0 < H_c < H_crit
    """
    if not 0.0 < H_c < p.H_crit:
        raise DomainError(f"passage level {H_c} outside (0, {p.H_crit:.6g})")
    if not 0.0 <= H0 < p.H_crit or not p.in_domain(0.0, math.sqrt(2.0 * max(H0, 0.0))):
        raise DomainError(f"initial energy {H0} is not inside the heteroclinic orbit")
    if n_paths < 2:
        raise DomainError(f"need at least two paths, got {n_paths}")
    dt = p.small_oscillation_period / OSCILLATOR_STEPS_PER_PERIOD if dt is None else float(dt)
    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    t_cap = resolve_t_cap(t_cap, m1_hint)
    if H0 >= H_c:
        return FptStats.immediate(n_paths, dt, t_cap)

    max_steps = int(math.ceil(t_cap / dt))
    sizes = [min(MC_BLOCK_PATHS, n_paths - start) for start in range(0, n_paths, MC_BLOCK_PATHS)]

    def run(block: int) -> np.ndarray:
        return _simulate_block(p, spec1, spec2, H0, H_c, dt, sizes[block], max_steps, seed, block, harmonics)

    logger.info(f"Duffing oscillator: {n_paths} paths from H0={H0:.4g} to H_c={H_c:.4g}, dt={dt:.3g}")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, range(len(sizes))))
    else:
        blocks = [run(b) for b in range(len(sizes))]
    stats = FptStats.from_times(np.concatenate(blocks), n_paths, dt, t_cap)
    if stats.flagged:
        logger.warning(f"Duffing oscillator: {stats.n_censored} of {n_paths} paths censored at t_cap={t_cap:.4g}")
    return stats
