"""
Composite Gauss-Legendre quadrature on panel grids.

A PanelGrid carries fixed-order Gauss-Legendre nodes on every panel and returns
cumulative integrals at every node and breakpoint, so nested integrals such as
int_z^xc s(y) dy can be evaluated once and reused as an integrand. The log_*
variants take and return logarithms, for integrands whose dynamic range
exceeds double precision. Improper
endpoint integrals are assembled from geometric cutoffs and judged by
scan_increments.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

import numpy as np

from fpte.constants import (
    CUTOFF_LEVELS,
    DIVERGENCE_GROWTH,
    FINITE_INCREMENT_RTOL,
    GEOMETRIC_DECAY_RATIO,
    GL_PANEL_ORDER,
    STALL_RATIO,
    STALL_WINDOW,
)
from fpte.errors import DomainError

Verdict = Literal["finite", "infinite", "inconclusive"]


@dataclass(frozen=True)
class PanelRule:
    """Gauss-Legendre rule on [-1, 1] with its spectral integration matrices."""

    nodes: np.ndarray
    weights: np.ndarray
    partial_left: np.ndarray  # [i, j]: weight of f_j in int_{-1}^{t_i}
    partial_right: np.ndarray  # [i, j]: weight of f_j in int_{t_i}^{1}


@lru_cache(maxsize=None)
def panel_rule(order: int = GL_PANEL_ORDER) -> PanelRule:
    """Build (and cache) the rule of the given order."""
    legendre = np.polynomial.legendre
    nodes, weights = legendre.leggauss(order)
    to_coeffs = np.linalg.inv(legendre.legvander(nodes, order - 1))
    partial = np.empty((order, order))
    for j in range(order):
        antiderivative = legendre.legint(to_coeffs[:, j], lbnd=-1.0)
        partial[:, j] = legendre.legval(nodes, antiderivative)
    return PanelRule(nodes, weights, partial, weights[None, :] - partial)


class PanelGrid:
    """Panels between consecutive breakpoints, each with its own Gauss-Legendre nodes."""

    def __init__(self, breakpoints, order: int = GL_PANEL_ORDER):
        breakpoints = np.asarray(breakpoints, dtype=float)
        if breakpoints.ndim != 1 or breakpoints.size < 2:
            raise DomainError("a panel grid needs at least two breakpoints")
        if np.any(np.diff(breakpoints) <= 0.0):
            raise DomainError("panel breakpoints must be strictly increasing")
        self.breakpoints = breakpoints
        self.order = order
        self.rule = panel_rule(order)
        self.half = 0.5 * np.diff(breakpoints)
        middle = 0.5 * (breakpoints[:-1] + breakpoints[1:])
        self.nodes = middle[:, None] + self.half[:, None] * self.rule.nodes[None, :]

    @property
    def n_panels(self) -> int:
        return self.half.size

    def refined(self) -> "PanelGrid":
        """Same grid with every panel split at its midpoint."""
        middle = 0.5 * (self.breakpoints[:-1] + self.breakpoints[1:])
        points = np.empty(2 * self.breakpoints.size - 1)
        points[0::2] = self.breakpoints
        points[1::2] = middle
        return PanelGrid(points, self.order)

    def panel_integrals(self, values: np.ndarray) -> np.ndarray:
        return self.half * (values @ self.rule.weights)

    def integrate(self, values: np.ndarray) -> float:
        return float(np.sum(self.panel_integrals(values)))

    def cumulative_left(self, values: np.ndarray, start: float = 0.0):
        """
        Integral from the first breakpoint up to every node and breakpoint.

        Returns:
            tuple: (node values with shape of ``nodes``, breakpoint values)
        """
        totals = self.panel_integrals(values)
        at_breaks = start + np.concatenate(([0.0], np.cumsum(totals)))
        at_nodes = at_breaks[:-1, None] + self.half[:, None] * (values @ self.rule.partial_left.T)
        return at_nodes, at_breaks

    def cumulative_right(self, values: np.ndarray, end: float = 0.0):
        """Integral from every node and breakpoint up to the last breakpoint."""
        totals = self.panel_integrals(values)
        at_breaks = end + np.concatenate((np.cumsum(totals[::-1])[::-1], [0.0]))
        at_nodes = at_breaks[1:, None] + self.half[:, None] * (values @ self.rule.partial_right.T)
        return at_nodes, at_breaks

    def _shifted(self, log_values: np.ndarray):
        shift = np.max(log_values, axis=1)
        shift = np.where(np.isfinite(shift), shift, 0.0)
        return np.exp(log_values - shift[:, None]), shift

    def log_panel_integrals(self, log_values: np.ndarray) -> np.ndarray:
        """log int exp(log_values) over every panel; each panel is shifted by its own maximum."""
        local, shift = self._shifted(log_values)
        return shift + log_positive(self.half * (local @ self.rule.weights))

    def log_cumulative_left(self, log_values: np.ndarray):
        """cumulative_left of exp(log_values), returned as logarithms."""
        local, shift = self._shifted(log_values)
        totals = shift + log_positive(self.half * (local @ self.rule.weights))
        at_breaks = np.concatenate(([-np.inf], np.logaddexp.accumulate(totals)))
        partial = shift[:, None] + log_positive(self.half[:, None] * (local @ self.rule.partial_left.T))
        return np.logaddexp(at_breaks[:-1, None], partial), at_breaks

    def log_cumulative_right(self, log_values: np.ndarray):
        """cumulative_right of exp(log_values), returned as logarithms."""
        local, shift = self._shifted(log_values)
        totals = shift + log_positive(self.half * (local @ self.rule.weights))
        at_breaks = np.concatenate((np.logaddexp.accumulate(totals[::-1])[::-1], [-np.inf]))
        partial = shift[:, None] + log_positive(self.half[:, None] * (local @ self.rule.partial_right.T))
        return np.logaddexp(at_breaks[1:, None], partial), at_breaks


def log_positive(values) -> np.ndarray:
    """log of values clipped at zero; zero and round-off negatives map to -inf."""
    with np.errstate(divide="ignore"):
        return np.log(np.maximum(values, 0.0))


def geometric_points(near: float, far: float, levels: int = CUTOFF_LEVELS) -> np.ndarray:
    """Cutoffs near + (far - near) 2^-j for j = 0..levels (works in either direction)."""
    return near + (far - near) * 2.0 ** -np.arange(levels + 1, dtype=float)


def merge_breakpoints(*groups, lower: float, upper: float) -> np.ndarray:
    """Sorted union of point groups restricted to [lower, upper], near-duplicates removed."""
    points = np.concatenate([np.atleast_1d(np.asarray(g, dtype=float)) for g in groups])
    points = np.concatenate((points, [lower, upper]))
    points = np.unique(points[(points >= lower) & (points <= upper)])
    scale = np.maximum(np.abs(points[1:]), np.abs(points[:-1]))
    keep = np.concatenate(([True], np.diff(points) > 8.0 * np.finfo(float).eps * scale))
    points = points[keep]
    points[-1] = upper
    return points


@dataclass(frozen=True)
class ScanResult:
    """Outcome of a geometric-cutoff scan of an improper integral."""

    value: float
    error: float
    verdict: Verdict


def scan_increments(increments) -> ScanResult:
    """
    Judge an improper integral from its cutoff increments.

    ``increments[j]`` is the integral over the (j+1)-th cutoff shell, ordered from
    the interior towards the singular endpoint.
    """
    d = np.asarray(increments, dtype=float)
    if d.size == 0:
        return ScanResult(0.0, 0.0, "finite")
    partial = np.cumsum(d)
    total = float(partial[-1])
    last = float(d[-1])
    first = float(d[0])

    if total == 0.0 and np.all(d == 0.0):
        return ScanResult(0.0, 0.0, "finite")

    if abs(last) <= FINITE_INCREMENT_RTOL * abs(total):
        ratio = _tail_ratio(d)
        tail = last * ratio / (1.0 - ratio)
        return ScanResult(total + tail, abs(tail) + abs(last), "finite")

    if d.size >= 3:
        tail3 = d[-3:]
        if np.all(np.diff(tail3) >= 0.0) and total > DIVERGENCE_GROWTH * max(abs(first), 1e-300):
            return ScanResult(np.inf, 0.0, "infinite")

    if d.size > STALL_WINDOW:
        window = d[-STALL_WINDOW - 1:]
        if np.all(window > 0.0):
            ratios = window[1:] / window[:-1]
            if np.all(ratios >= STALL_RATIO):
                return ScanResult(np.inf, 0.0, "infinite")
            if np.all(ratios <= GEOMETRIC_DECAY_RATIO):
                ratio = float(ratios[-1])
                tail = last * ratio / (1.0 - ratio)
                return ScanResult(total + tail, abs(tail), "finite")

    return ScanResult(total, abs(last), "inconclusive")


def _tail_ratio(d: np.ndarray) -> float:
    if d.size < 2 or d[-2] == 0.0:
        return 0.0
    return float(np.clip(d[-1] / d[-2], 0.0, GEOMETRIC_DECAY_RATIO))


def locate_breakpoints(breaks: np.ndarray, points) -> np.ndarray:
    """Index of the breakpoint nearest to each point."""
    points = np.asarray(points, dtype=float)
    idx = np.clip(np.searchsorted(breaks, points), 1, breaks.size - 1)
    lower_closer = np.abs(points - breaks[idx - 1]) <= np.abs(breaks[idx] - points)
    return np.where(lower_closer, idx - 1, idx)
