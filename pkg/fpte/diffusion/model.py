"""
One-dimensional Ito diffusion dx = m(x) dt + sigma(x) dW on an interval.

A DiffusionModel holds the drift m and squared diffusion sigma^2 as vectorized
callables together with the boundary points x_l < x_c and a reference point
x_ref for the scale density. Models are immutable; derived tables (the scale
exponent anchors, boundary classification, normalization constants) live in a
per-instance cache guarded by a re-entrant lock.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Callable

import numpy as np
from scipy import integrate

from fpte.constants import (
    ANCHOR_LEVELS,
    INTERIOR_PANELS,
    RIGHT_CLUSTER_LEVELS,
    SCALE_EXPONENT_RTOL,
)
from fpte.errors import DomainError, NumericalFailure
from fpte.numerics.quadrature import geometric_points, merge_breakpoints, panel_rule

logger = logging.getLogger(__name__)

Coefficient = Callable[[np.ndarray], np.ndarray]


class BoundaryKind(Enum):
    """Feller-type classification of a boundary point."""

    ENTRANCE = "Entrance"
    REFLECTING = "Reflecting"
    EXIT = "Exit"
    REGULAR = "Regular"
    UNCLASSIFIED = "Unclassified"


@dataclass(frozen=True)
class MeasureValue:
    """
    Value of a scale or speed type measure.

    ``infinite`` marks a divergent integral (``value`` is then inf and
    ``estimate_error`` is ignored); ``conclusive`` is False when the divergence
    scan could not decide either way.
    """

    value: float
    estimate_error: float = 0.0
    infinite: bool = False
    conclusive: bool = True

    @classmethod
    def infinity(cls) -> "MeasureValue":
        return cls(float("inf"), 0.0, True, True)

    @property
    def is_finite(self) -> bool:
        return not self.infinite

    def __add__(self, other: "MeasureValue") -> "MeasureValue":
        if self.infinite or other.infinite:
            return MeasureValue.infinity()
        return MeasureValue(
            self.value + other.value,
            self.estimate_error + other.estimate_error,
            False,
            self.conclusive and other.conclusive,
        )


def _sample_points(left: float, right: float) -> np.ndarray:
    width = right - left
    interior = np.linspace(left, right, 257)[1:-1]
    near = np.concatenate((left + width * 2.0 ** -np.arange(2, 30), right - width * 2.0 ** -np.arange(2, 30)))
    return np.concatenate((interior, near))


@dataclass(frozen=True, eq=False)
class DiffusionModel:
    """
    Drift and squared diffusion on (left, right).

    Args:
        drift: Vectorized m(x)
        diffusion_sq: Vectorized sigma^2(x), strictly positive on the open interval
        left: Left boundary x_l
        right: Right boundary x_c
        reference: Reference point of the scale density; defaults to the midpoint
        name: Label used in logs and outputs
        left_point_mass: Declared speed-measure atom at x_l (0 means reflecting);
            None leaves the boundary behavior unspecified
    """

    drift: Coefficient
    diffusion_sq: Coefficient
    left: float
    right: float
    reference: float | None = None
    name: str = "diffusion"
    left_point_mass: float | None = None
    _cache: dict = field(default_factory=dict, init=False, repr=False, compare=False)
    _lock: Any = field(default_factory=threading.RLock, init=False, repr=False, compare=False)

    def __post_init__(self):
        left, right = float(self.left), float(self.right)
        if not (np.isfinite(left) and np.isfinite(right) and left < right):
            raise DomainError(f"{self.name}: need finite x_l < x_c, got ({left}, {right})")
        reference = 0.5 * (left + right) if self.reference is None else float(self.reference)
        if not left < reference < right:
            raise DomainError(f"{self.name}: reference point {reference} outside ({left}, {right})")
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "reference", reference)

        samples = _sample_points(left, right)
        sigma_sq = np.asarray(self.diffusion_sq(samples), dtype=float)
        if np.any(~np.isfinite(sigma_sq)) or np.any(sigma_sq <= 0.0):
            bad = samples[~(np.isfinite(sigma_sq) & (sigma_sq > 0.0))][0]
            raise DomainError(f"{self.name}: sigma^2 must be positive on the interior, fails at x={bad:.6g}")

    def m(self, x) -> np.ndarray:
        return np.asarray(self.drift(np.asarray(x, dtype=float)), dtype=float)

    def sigma_sq(self, x) -> np.ndarray:
        return np.asarray(self.diffusion_sq(np.asarray(x, dtype=float)), dtype=float)

    def log_scale_rate(self, x) -> np.ndarray:
        """2 m / sigma^2, the derivative of -log s."""
        x = np.asarray(x, dtype=float)
        sigma_sq = self.sigma_sq(x)
        if np.any(~(sigma_sq > 0.0)):
            raise NumericalFailure(f"{self.name}: sigma^2 vanishes at an interior quadrature node")
        return 2.0 * self.m(x) / sigma_sq

    def with_time_scale(self, c: float) -> "DiffusionModel":
        """Model with both coefficients multiplied by c (time runs c times faster)."""
        if not c > 0.0:
            raise DomainError(f"time scale must be positive, got {c}")
        drift, diffusion_sq = self.drift, self.diffusion_sq
        return replace(
            self,
            drift=lambda x: c * np.asarray(drift(x), dtype=float),
            diffusion_sq=lambda x: c * np.asarray(diffusion_sq(x), dtype=float),
            name=f"{self.name}*{c:g}",
        )

    def with_reference(self, reference: float) -> "DiffusionModel":
        return replace(self, reference=reference)

    def cached(self, key: str, factory: Callable[[], Any]) -> Any:
        with self._lock:
            if key not in self._cache:
                self._cache[key] = factory()
            return self._cache[key]

    @property
    def scale_exponent(self) -> "ScaleExponent":
        return self.cached("scale_exponent", lambda: ScaleExponent(self))


class ScaleExponent:
    """
    phi(y) = int_{x_ref}^{y} 2 m / sigma^2, tabulated at anchor points.

    Anchors cluster geometrically at both boundaries; the exponent between anchors
    is integrated by adaptive Gauss-Kronrod once. Queries add a Gauss-Legendre
    integral from the nearest anchor below.
    """

    def __init__(self, model: DiffusionModel):
        self.model = model
        width = model.right - model.left
        points = merge_breakpoints(
            geometric_points(model.left, model.right, ANCHOR_LEVELS)[1:],
            np.linspace(model.left, model.right, INTERIOR_PANELS + 1),
            geometric_points(model.right, model.left, RIGHT_CLUSTER_LEVELS)[1:],
            [model.reference],
            lower=model.left,
            upper=model.right,
        )
        self.anchors = points[(points > model.left) & (points < model.right)]

        def rate(x: float) -> float:
            return float(model.log_scale_rate(np.array([x]))[0])

        pieces = np.empty(self.anchors.size - 1)
        for i, (a, b) in enumerate(zip(self.anchors[:-1], self.anchors[1:])):
            value, _ = integrate.quad(rate, a, b, epsabs=0.0, epsrel=SCALE_EXPONENT_RTOL, limit=200)
            pieces[i] = value
        cumulative = np.concatenate(([0.0], np.cumsum(pieces)))
        ref_index = int(np.argmin(np.abs(self.anchors - model.reference)))
        self.values = cumulative - cumulative[ref_index]
        logger.debug(f"{model.name}: scale exponent tabulated at {self.anchors.size} anchors, width {width:.6g}")

    def __call__(self, y) -> np.ndarray:
        y = np.asarray(y, dtype=float)
        rule = panel_rule()
        index = np.clip(np.searchsorted(self.anchors, y, side="right") - 1, 0, self.anchors.size - 1)
        base = self.anchors[index]
        span = y - base
        points = base[..., None] + 0.5 * span[..., None] * (rule.nodes + 1.0)
        local = 0.5 * span * (self.model.log_scale_rate(points) @ rule.weights)
        return self.values[index] + local
