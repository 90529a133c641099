"""
Scale and speed densities, their measures, and left-boundary classification.

Improper endpoint integrals are taken over geometric cutoff shells
x_e + (x_inner - x_e) 2^-j, j = 0..40, on one composite Gauss-Legendre grid; the
shell increments are judged by scan_increments. Nested measures use the Fubini
forms

    Sigma_l(x0) = int_{x_l}^{x0} s(y) M[y, x0] dy
    N_l(x0)     = int_{x_l}^{x0} S[z, x0] mu(z) dz

so the inner integral is always proper.

Densities enter every integral as logarithms, log s = -phi and
log mu = phi - log sigma^2. Panel and shell integrals are shifted by their own
maximum, so a scale exponent spanning thousands of units neither overflows nor
makes the verdicts depend on x_ref.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from fpte.constants import CUTOFF_LEVELS, INTERIOR_PANELS
from fpte.diffusion.model import BoundaryKind, DiffusionModel, MeasureValue
from fpte.errors import DomainError, IntegrabilityError, PreconditionError
from fpte.numerics.quadrature import (
    PanelGrid,
    Verdict,
    geometric_points,
    locate_breakpoints,
    log_positive,
    merge_breakpoints,
    scan_increments,
)

logger = logging.getLogger(__name__)


def _check_interior(model: DiffusionModel, y) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if np.any(~((y > model.left) & (y < model.right))):
        raise DomainError(f"{model.name}: evaluation point outside ({model.left}, {model.right})")
    return y


def _scalar(values: np.ndarray):
    return float(values) if np.ndim(values) == 0 else values


def log_scale_density(model: DiffusionModel, y):
    """log s(y) = -phi(y)."""
    y = _check_interior(model, y)
    return _scalar(-model.scale_exponent(y))


def log_speed_density(model: DiffusionModel, y):
    """log mu(y) = phi(y) - log sigma^2(y)."""
    y = _check_interior(model, y)
    return _scalar(model.scale_exponent(y) - np.log(model.sigma_sq(y)))


def scale_density(model: DiffusionModel, y):
    """s(y) = exp(-int_{x_ref}^{y} 2 m / sigma^2); strictly positive."""
    return _scalar(np.exp(log_scale_density(model, y)))


def speed_density(model: DiffusionModel, y):
    """mu(y) = 1 / (sigma^2(y) s(y))."""
    return _scalar(np.exp(log_speed_density(model, y)))


def _log_density(model: DiffusionModel, which: str) -> Callable[[np.ndarray], np.ndarray]:
    if which == "scale":
        return lambda y: -model.scale_exponent(y)
    return lambda y: model.scale_exponent(y) - np.log(model.sigma_sq(y))


@dataclass(frozen=True)
class LogIntegral:
    """An integral held as log value and log error, with its divergence verdict."""

    log_value: float
    log_error: float
    verdict: Verdict

    def __add__(self, other: "LogIntegral") -> "LogIntegral":
        if "infinite" in (self.verdict, other.verdict):
            verdict = "infinite"
        elif "inconclusive" in (self.verdict, other.verdict):
            verdict = "inconclusive"
        else:
            verdict = "finite"
        return LogIntegral(
            float(np.logaddexp(self.log_value, other.log_value)),
            float(np.logaddexp(self.log_error, other.log_error)),
            verdict,
        )

    def measure(self, label: str) -> MeasureValue:
        if self.verdict == "infinite":
            return MeasureValue.infinity()
        with np.errstate(over="ignore"):
            value, error = float(np.exp(self.log_value)), float(np.exp(self.log_error))
        if not np.isfinite(value):
            logger.warning(f"{label}: finite, but exp({self.log_value:.6g}) exceeds double precision")
        if self.verdict == "inconclusive":
            logger.warning(f"{label}: divergence scan inconclusive, partial value exp({self.log_value:.6g})")
            return MeasureValue(value, error, infinite=False, conclusive=False)
        return MeasureValue(value, error)


class CutoffGrid:
    """
    Panel grid between an inner point and the last geometric cutoff towards a
    model endpoint.

    ``cutoffs[0]`` is the inner point and ``cutoffs[j]`` moves towards the endpoint
    by halving the distance; model anchors are merged in so the integrands stay
    resolved where the scale exponent varies fastest.
    """

    def __init__(self, model: DiffusionModel, endpoint: float, inner: float, levels: int = CUTOFF_LEVELS):
        self.endpoint_is_left = endpoint < inner
        self.cutoffs = geometric_points(endpoint, inner, levels)
        lower, upper = sorted((float(self.cutoffs[-1]), float(inner)))
        breaks = merge_breakpoints(
            self.cutoffs,
            model.scale_exponent.anchors,
            np.linspace(lower, upper, 9),
            lower=lower,
            upper=upper,
        )
        self.grid = PanelGrid(breaks)
        self.positions = locate_breakpoints(breaks, self.cutoffs)

    @property
    def nodes(self) -> np.ndarray:
        return self.grid.nodes

    def log_toward_inner(self, log_values: np.ndarray) -> np.ndarray:
        """log of the integral from every node to the inner point."""
        if self.endpoint_is_left:
            at_nodes, _ = self.grid.log_cumulative_right(log_values)
        else:
            at_nodes, _ = self.grid.log_cumulative_left(log_values)
        return at_nodes

    def log_shell_increments(self, log_values: np.ndarray) -> np.ndarray:
        """log integrals over shells [c_j, c_{j-1}], ordered from the inner point outwards."""
        panels = self.grid.log_panel_integrals(log_values)
        lo = np.minimum(self.positions[:-1], self.positions[1:])
        hi = np.maximum(self.positions[:-1], self.positions[1:])
        return np.array([np.logaddexp.reduce(panels[a:b]) if b > a else -np.inf for a, b in zip(lo, hi)])

    def scan(self, log_values: np.ndarray) -> LogIntegral:
        increments = self.log_shell_increments(log_values)
        finite = increments[np.isfinite(increments)]
        shift = float(finite.max()) if finite.size else 0.0
        result = scan_increments(np.exp(increments - shift))
        if result.verdict == "infinite":
            return LogIntegral(math.inf, -math.inf, "infinite")
        return LogIntegral(
            shift + float(log_positive(result.value)),
            shift + float(log_positive(result.error)),
            result.verdict,
        )


def _proper_integral(model: DiffusionModel, log_density, a: float, b: float) -> LogIntegral:
    breaks = merge_breakpoints(
        model.scale_exponent.anchors,
        np.linspace(a, b, INTERIOR_PANELS + 1),
        lower=a,
        upper=b,
    )
    grid = PanelGrid(breaks)
    coarse = float(np.logaddexp.reduce(grid.log_panel_integrals(log_density(grid.nodes))))
    fine_grid = grid.refined()
    fine = float(np.logaddexp.reduce(fine_grid.log_panel_integrals(log_density(fine_grid.nodes))))
    hi, lo = max(coarse, fine), min(coarse, fine)
    error = hi + math.log(-math.expm1(lo - hi)) if lo < hi else -math.inf
    return LogIntegral(fine, error, "finite")


def _endpoint_integral(model: DiffusionModel, log_density, endpoint: float, inner: float) -> LogIntegral:
    cutoff = CutoffGrid(model, endpoint, inner)
    return cutoff.scan(log_density(cutoff.nodes))


def _log_measure(model: DiffusionModel, which: str, a: float, b: float) -> LogIntegral:
    a, b = float(a), float(b)
    if not model.left <= a <= b <= model.right:
        raise DomainError(f"{model.name}: need {model.left} <= a <= b <= {model.right}, got a={a}, b={b}")
    if a == b:
        return LogIntegral(-math.inf, -math.inf, "finite")

    log_density = _log_density(model, which)
    left_open = a == model.left
    right_open = b == model.right
    if left_open and right_open:
        split = model.reference
        return _endpoint_integral(model, log_density, a, split) + _endpoint_integral(model, log_density, b, split)
    if left_open:
        return _endpoint_integral(model, log_density, a, b)
    if right_open:
        return _endpoint_integral(model, log_density, b, a)
    return _proper_integral(model, log_density, a, b)


def _measure(model: DiffusionModel, which: str, a: float, b: float) -> MeasureValue:
    label = f"{model.name} {which} measure [{float(a):.6g}, {float(b):.6g}]"
    return _log_measure(model, which, a, b).measure(label)


def scale_measure(model: DiffusionModel, a: float, b: float) -> MeasureValue:
    """
    S[a, b] = int_a^b s(y) dy.

    An endpoint equal to a model boundary is taken as an improper limit and may
    come back Infinite.
    """
    return _measure(model, "scale", a, b)


def speed_measure(model: DiffusionModel, a: float, b: float) -> MeasureValue:
    """M[a, b] = int_a^b mu(y) dy, with the same endpoint handling as scale_measure."""
    return _measure(model, "speed", a, b)


def _check_start(model: DiffusionModel, x0: float) -> float:
    x0 = float(x0)
    if not model.left < x0 <= model.right:
        raise DomainError(f"{model.name}: x0={x0} outside ({model.left}, {model.right}]")
    return x0


def measure_N_l(model: DiffusionModel, x0: float) -> MeasureValue:
    """N_l(x0) = int_{x_l}^{x0} S[z, x0] mu(z) dz."""
    x0 = _check_start(model, x0)

    def compute() -> MeasureValue:
        cutoff = CutoffGrid(model, model.left, x0)
        log_s = _log_density(model, "scale")(cutoff.nodes)
        log_mu = _log_density(model, "speed")(cutoff.nodes)
        integrand = cutoff.log_toward_inner(log_s) + log_mu
        return cutoff.scan(integrand).measure(f"{model.name} N_l({x0:.6g})")

    return model.cached(f"N_l:{x0!r}", compute)


def measure_Sigma_l(model: DiffusionModel, x0: float) -> MeasureValue:
    """Sigma_l(x0) = int_{x_l}^{x0} S(x_l, z] mu(z) dz."""
    x0 = _check_start(model, x0)

    def compute() -> MeasureValue:
        cutoff = CutoffGrid(model, model.left, x0)
        log_s = _log_density(model, "scale")(cutoff.nodes)
        log_mu = _log_density(model, "speed")(cutoff.nodes)
        integrand = log_s + cutoff.log_toward_inner(log_mu)
        return cutoff.scan(integrand).measure(f"{model.name} Sigma_l({x0:.6g})")

    return model.cached(f"Sigma_l:{x0!r}", compute)


def classify_left_boundary(model: DiffusionModel) -> BoundaryKind:
    """
    Classify x_l from Sigma_l, N_l and the speed measure, all taken at x_ref.

    Entrance: Sigma_l infinite, N_l finite. Exit: Sigma_l finite, M(x_l, x_ref]
    infinite. Both finite: Reflecting when the model declares a zero point mass
    at x_l, Regular otherwise. Anything else, including an inconclusive scan of a
    measure the decision depends on, is Unclassified.
    """

    def compute() -> BoundaryKind:
        x0 = model.reference
        sigma = measure_Sigma_l(model, x0)
        if not sigma.conclusive:
            return BoundaryKind.UNCLASSIFIED
        if sigma.infinite:
            n_l = measure_N_l(model, x0)
            if n_l.conclusive and n_l.is_finite:
                return BoundaryKind.ENTRANCE
            return BoundaryKind.UNCLASSIFIED

        speed = speed_measure(model, model.left, x0)
        if not speed.conclusive:
            return BoundaryKind.UNCLASSIFIED
        if speed.infinite:
            return BoundaryKind.EXIT
        n_l = measure_N_l(model, x0)
        if not (n_l.conclusive and n_l.is_finite):
            return BoundaryKind.UNCLASSIFIED
        if model.left_point_mass == 0.0:
            return BoundaryKind.REFLECTING
        return BoundaryKind.REGULAR

    kind = model.cached("left_boundary", compute)
    logger.debug(f"{model.name}: left boundary {kind.value}")
    return kind


def _log_normalization(model: DiffusionModel) -> float:
    def compute() -> float:
        total = _log_measure(model, "speed", model.left, model.right)
        if total.verdict != "finite":
            raise IntegrabilityError(f"{model.name}: speed measure of ({model.left}, {model.right}) is not finite")
        return total.log_value

    return model.cached("log_speed_total", compute)


def stationary_density(model: DiffusionModel, x):
    """
    Normalized stationary density p(x) = mu(x) / M(x_l, x_c).

    Valid whenever the probability flux vanishes at both ends, so the left
    boundary may be Entrance or reflecting; the right end is treated as
    reflecting.

    Raises:
        IntegrabilityError: when the speed measure of the whole interval diverges
    """
    x = _check_interior(model, x)
    return _scalar(np.exp(model.scale_exponent(x) - np.log(model.sigma_sq(x)) - _log_normalization(model)))


def require_entrance(model: DiffusionModel) -> None:
    """
    Accept an Entrance left boundary, or S(x_l, x_ref] infinite with M(x_l, x_ref]
    finite; raise PreconditionError otherwise.
    """
    kind = classify_left_boundary(model)
    if kind is BoundaryKind.ENTRANCE:
        return
    scale = scale_measure(model, model.left, model.reference)
    speed = speed_measure(model, model.left, model.reference)
    if scale.infinite and speed.conclusive and speed.is_finite:
        logger.info(f"{model.name}: left boundary {kind.value}, accepted on S infinite and M finite")
        return
    raise PreconditionError(f"{model.name}: left boundary is {kind.value}, not an entrance boundary")
