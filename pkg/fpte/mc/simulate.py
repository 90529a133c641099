"""
Euler-Maruyama first-passage simulation of a one-dimensional diffusion.

Paths run in blocks of MC_BLOCK_PATHS. Each block seeds the compiled kernel
from its own counter-based stream, so results depend only on (seed, n_paths)
and never on the thread count; the kernel releases the GIL, so blocks run in
parallel on a thread pool. The kernel steps one path at a time on m and
sigma^2 tabulated between x_l and xc. Inside a step the crossing of xc is
tested twice: directly, with linear interpolation of the passage time, and
through the Brownian-bridge probability
exp(-2 (xc - x_n)(xc - x_{n+1}) / (sigma^2 dt)) of an unseen excursion, which
is skipped once it falls below exp(-40).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from numba import njit

from fpte.constants import CENSOR_LIMIT, MC_BLOCK_PATHS, MC_TABLE_CELLS, MC_TABLE_REFINE, T_CAP_FACTOR
from fpte.diffusion.model import DiffusionModel
from fpte.errors import DomainError, NumericalFailure
from fpte.noise.synthesis import make_rng

logger = logging.getLogger(__name__)

_NEWTON_STEPS = 60
_BOUNDARY_OFFSET = 1e-12  # states are kept at least this fraction of (xc - x_l) above x_l
_BRIDGE_CUTOFF = 40.0


@dataclass(frozen=True)
class FptStats:
    """Sample statistics of uncensored first-passage times."""

    n_paths: int
    mean: float
    second_moment: float
    variance: float
    se_mean: float
    se_variance: float
    n_censored: int
    dt: float
    t_cap: float
    times: np.ndarray = field(repr=False, compare=False)

    @property
    def censored_fraction(self) -> float:
        return self.n_censored / self.n_paths

    @property
    def flagged(self) -> bool:
        return self.censored_fraction >= CENSOR_LIMIT

    @classmethod
    def from_times(cls, times: np.ndarray, n_paths: int, dt: float, t_cap: float) -> "FptStats":
        """Statistics of the finite entries of ``times``; NaN marks a censored path."""
        done = np.asarray(times, dtype=float)
        done = done[np.isfinite(done)]
        n_censored = n_paths - done.size
        if done.size < 2:
            raise NumericalFailure(f"only {done.size} of {n_paths} paths reached the threshold")
        mean = float(np.mean(done))
        second = float(np.mean(done**2))
        centred = done - mean
        variance = float(np.mean(centred**2))
        fourth = float(np.mean(centred**4))
        n = done.size
        return cls(
            n_paths=n_paths,
            mean=mean,
            second_moment=second,
            variance=variance,
            se_mean=float(np.std(done, ddof=1)) / math.sqrt(n),
            se_variance=math.sqrt(max(fourth - variance**2, 0.0) / n),
            n_censored=n_censored,
            dt=dt,
            t_cap=t_cap,
            times=done,
        )

    def scaled(self, factor: float) -> "FptStats":
        """The same sample with every time multiplied by ``factor``."""
        if not factor > 0.0:
            raise DomainError(f"time factor must be positive, got {factor}")
        if self.times.size < 2:
            return FptStats.immediate(self.n_paths, self.dt * factor, self.t_cap * factor)
        times = np.concatenate((self.times * factor, np.full(self.n_censored, np.nan)))
        return FptStats.from_times(times, self.n_paths, self.dt * factor, self.t_cap * factor)

    @classmethod
    def immediate(cls, n_paths: int, dt: float, t_cap: float) -> "FptStats":
        """Every path starts on the threshold."""
        return cls(n_paths, 0.0, 0.0, 0.0, 0.0, 0.0, 0, dt, t_cap, np.zeros(n_paths))


def default_dt(model: DiffusionModel, xc: float) -> float:
    """min(1e-3, 1e-3 (xc - x_l)^2 / max sigma^2)."""
    samples = np.linspace(model.left, xc, 258)[1:-1]
    peak = float(np.max(model.sigma_sq(samples)))
    return min(1e-3, 1e-3 * (xc - model.left) ** 2 / peak)


def resolve_t_cap(t_cap: float | None, m1_hint: float | None) -> float:
    if t_cap is None:
        if m1_hint is None or not m1_hint > 0.0:
            raise DomainError("t_cap is required when no quadrature mean is available")
        t_cap = T_CAP_FACTOR * m1_hint
    if not t_cap > 0.0:
        raise DomainError(f"t_cap must be positive, got {t_cap}")
    return float(t_cap)


@dataclass(frozen=True)
class CoefficientTable:
    """
    m and sigma^2 on nodes between the simulation floor and xc.

    Nodes below ``uniform_start`` halve geometrically towards x_l and are found
    by bisection; from ``uniform_start`` on they are equispaced with ``spacing``.
    """

    nodes: np.ndarray
    drift: np.ndarray
    diffusion_sq: np.ndarray
    uniform_index: int
    uniform_start: float
    spacing: float

    @classmethod
    def build(cls, model: DiffusionModel, xc: float, lower: float) -> "CoefficientTable":
        spacing = (xc - lower) / MC_TABLE_CELLS
        start = lower + spacing
        depth = math.log2((start - model.left) / (lower - model.left))
        ratios = 2.0 ** (-np.arange(1, int(math.ceil(depth * MC_TABLE_REFINE)) + 1) / MC_TABLE_REFINE)
        near = model.left + (start - model.left) * ratios
        near = np.sort(near[near > lower])
        uniform = start + spacing * np.arange(MC_TABLE_CELLS, dtype=float)
        nodes = np.concatenate(([lower], near, uniform))
        nodes[-1] = xc
        inside = np.minimum(nodes, np.nextafter(model.right, model.left))
        return cls(
            nodes=nodes,
            drift=model.m(inside),
            diffusion_sq=model.sigma_sq(inside),
            uniform_index=near.size + 1,
            uniform_start=float(start),
            spacing=float(spacing),
        )


@njit(nogil=True)
def _interpolate(nodes, values, uniform_index, uniform_start, spacing, x):
    if x >= uniform_start:
        i = uniform_index + int((x - uniform_start) / spacing)
    else:
        i = np.searchsorted(nodes[: uniform_index + 1], x) - 1
    i = min(max(i, 0), nodes.size - 2)
    t = (x - nodes[i]) / (nodes[i + 1] - nodes[i])
    return values[i] + t * (values[i + 1] - values[i])


@njit(nogil=True)
def _implicit_step(nodes, drift, uniform_index, uniform_start, spacing, x, kick, dt, left, lower):
    """Solve y = x + m(y) dt + kick by safeguarded Newton, keeping y above x_l."""
    y = max(x + kick, lower)
    for _ in range(_NEWTON_STEPS):
        h = 1e-7 * (y - left)
        m_y = _interpolate(nodes, drift, uniform_index, uniform_start, spacing, y)
        m_h = _interpolate(nodes, drift, uniform_index, uniform_start, spacing, y + h)
        slope = 1.0 - dt * (m_h - m_y) / h
        residual = y - x - m_y * dt - kick
        proposal = y - (residual / slope if slope > 0.0 else residual)
        if not proposal > left:
            proposal = 0.5 * (y + left)
        if abs(proposal - y) <= 1e-12 * max(abs(y), 1e-300):
            return proposal
        y = proposal
    return y


@njit(nogil=True)
def _passage_block(
    nodes, drift, diffusion_sq, uniform_index, uniform_start, spacing, x0, xc, left, lower, dt, max_steps, seed, times
):
    np.random.seed(seed)
    sqrt_dt = math.sqrt(dt)
    for k in range(times.size):
        x = max(x0, lower)
        times[k] = np.nan
        for step in range(max_steps):
            sig_sq = _interpolate(nodes, diffusion_sq, uniform_index, uniform_start, spacing, x)
            increment = _interpolate(nodes, drift, uniform_index, uniform_start, spacing, x) * dt
            kick = math.sqrt(sig_sq) * sqrt_dt * np.random.standard_normal()
            y = x + increment + kick
            if abs(increment) > x - left or y <= left:
                y = _implicit_step(nodes, drift, uniform_index, uniform_start, spacing, x, kick, dt, left, lower)
            if y < left:
                y = 2.0 * left - y
            y = max(y, lower)

            if y >= xc:
                fraction = (xc - x) / (y - x)
                times[k] = (step + min(max(fraction, 0.0), 1.0)) * dt
                break
            exponent = 2.0 * (xc - x) * (xc - y) / (sig_sq * dt)
            if exponent < _BRIDGE_CUTOFF and np.random.random() < math.exp(-exponent):
                times[k] = (step + 0.5) * dt
                break
            x = y
    return times


def simulate_fpt_1d(
    model: DiffusionModel,
    x0: float,
    xc: float,
    dt: float | None = None,
    n_paths: int = 10_000,
    t_cap: float | None = None,
    seed: int = 0,
    m1_hint: float | None = None,
    threads: int = 1,
) -> FptStats:
    """
    Passage times of dx = m dt + sigma dW from x0 to xc.

    States that would leave (x_l, inf) are first handled by a drift-implicit
    step and then reflected at x_l. ``t_cap`` defaults to T_CAP_FACTOR *
    ``m1_hint``; one of the two is required.

    The coefficients are linearly interpolated from a CoefficientTable with
    MC_TABLE_CELLS equispaced cells and a geometric layer towards x_l.

    Raises:
        DomainError: for x0 outside [x_l, xc], xc beyond the model or dt <= 0
    """
    x0, xc = float(x0), float(xc)
    if not model.left < xc <= model.right:
        raise DomainError(f"{model.name}: threshold {xc} outside ({model.left}, {model.right}]")
    if not model.left <= x0 <= xc:
        raise DomainError(f"{model.name}: start {x0} outside [{model.left}, {xc}]")
    if n_paths < 2:
        raise DomainError(f"need at least two paths, got {n_paths}")
    dt = default_dt(model, xc) if dt is None else float(dt)
    if not dt > 0.0:
        raise DomainError(f"dt must be positive, got {dt}")
    t_cap = resolve_t_cap(t_cap, m1_hint)
    if x0 == xc:
        return FptStats.immediate(n_paths, dt, t_cap)

    max_steps = int(math.ceil(t_cap / dt))
    sizes = [min(MC_BLOCK_PATHS, n_paths - start) for start in range(0, n_paths, MC_BLOCK_PATHS)]
    lower = model.left + _BOUNDARY_OFFSET * (xc - model.left)
    table = CoefficientTable.build(model, xc, lower)

    def run(block: int) -> np.ndarray:
        block_seed = int(make_rng(seed, block).integers(0, 2**32))
        return _passage_block(
            table.nodes,
            table.drift,
            table.diffusion_sq,
            table.uniform_index,
            table.uniform_start,
            table.spacing,
            x0,
            xc,
            model.left,
            lower,
            dt,
            max_steps,
            block_seed,
            np.empty(sizes[block]),
        )

    logger.info(f"{model.name}: {n_paths} paths from {x0:g} to {xc:g}, dt={dt:.3g}, t_cap={t_cap:.4g}")
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(run, range(len(sizes))))
    else:
        blocks = [run(b) for b in range(len(sizes))]
    stats = FptStats.from_times(np.concatenate(blocks), n_paths, dt, t_cap)
    if stats.flagged:
        logger.warning(f"{model.name}: {stats.n_censored} of {n_paths} paths censored at t_cap={t_cap:.4g}")
    return stats


def dump_passage_times(path: str | Path, stats: FptStats) -> Path:
    """Write uncensored passage times as a single column of text."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    np.savetxt(path, stats.times, fmt="%.17g", header=f"passage times, {stats.n_censored} censored", comments="# ")
    logger.info(f"Wrote {stats.times.size} passage times to {path}")
    return path
