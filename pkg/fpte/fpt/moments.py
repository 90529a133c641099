"""
First-passage-time moments of a one-dimensional diffusion.

Every moment is evaluated on one composite Gauss-Legendre grid whose
breakpoints include the requested start points. Nested integrals become
cumulative integrals over that grid, so the recursion M_{n-1} -> M_n reuses the
node values of the previous moment without interpolation:

    entrance:  M_n(x0) = 2n [ int_{x0}^{xc} S[z, xc] M_{n-1} mu dz
                              + S[x0, xc] int_{x_l}^{x0} M_{n-1} mu dz ]
    regular:   M_n(x0) = 2n [ (1 - p) int_{x0}^{xc} S[z, xc] M_{n-1} mu dz
                              + p int_{D}^{x0} S[D, z] M_{n-1} mu dz ],
               p = S[x0, xc] / S[D, xc]

The entrance grid starts at x_l + (xc - x_l) 2^-40; the neglected tail is below
quadrature tolerance for any boundary where N_l is finite. The recursion runs on
logarithms of the densities and cumulative integrals, so products such as
S[z, xc] mu(z) stay finite when s and mu separately over- or underflow.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from fpte.constants import (
    CUTOFF_LEVELS,
    DEFAULT_ATOL_SCALE,
    DEFAULT_RTOL,
    INTERIOR_PANELS,
    MAX_REFINEMENTS,
    RIGHT_CLUSTER_LEVELS,
)
from fpte.diffusion.measures import log_scale_density, log_speed_density, require_entrance
from fpte.diffusion.model import DiffusionModel
from fpte.errors import DomainError, NumericalFailure
from fpte.numerics.quadrature import (
    PanelGrid,
    geometric_points,
    locate_breakpoints,
    merge_breakpoints,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class MomentCurve:
    """
    Moments M_1..M_N of the passage time to ``target`` over a set of start points.

    ``moments[n - 1, i]`` is M_n at ``start_points[i]``; ``quadrature_error`` has the
    same shape and holds the change under one grid refinement.
    """

    start_points: np.ndarray
    target: float
    moments: np.ndarray
    quadrature_error: np.ndarray

    @property
    def n_max(self) -> int:
        return self.moments.shape[0]

    def moment(self, n: int) -> np.ndarray:
        if n == 0:
            return np.ones_like(self.start_points)
        if not 1 <= n <= self.n_max:
            raise DomainError(f"moment order {n} not available (n_max={self.n_max})")
        return self.moments[n - 1]

    @property
    def mean(self) -> np.ndarray:
        return self.moments[0]

    @property
    def variance(self) -> np.ndarray:
        return self.moment(2) - self.mean**2


def _singular_points(model: DiffusionModel, xc: float) -> np.ndarray:
    width = xc - model.left
    return model.left + width * 2.0 ** -np.arange(1, CUTOFF_LEVELS + 1, dtype=float)


def _breakpoints(model: DiffusionModel, lower: float, xc: float, points: np.ndarray) -> np.ndarray:
    return merge_breakpoints(
        np.linspace(lower, xc, INTERIOR_PANELS + 1),
        _singular_points(model, xc),
        geometric_points(xc, lower, RIGHT_CLUSTER_LEVELS)[1:],
        geometric_points(lower, xc, RIGHT_CLUSTER_LEVELS)[1:],
        model.scale_exponent.anchors,
        points,
        lower=lower,
        upper=xc,
    )


Recursion = Callable[[DiffusionModel, PanelGrid, int], np.ndarray]


def _entrance_recursion(model: DiffusionModel, grid: PanelGrid, n_max: int) -> np.ndarray:
    log_s = log_scale_density(model, grid.nodes)
    log_mu = log_speed_density(model, grid.nodes)
    right_s, right_s_breaks = grid.log_cumulative_right(log_s)

    previous = np.zeros_like(log_s)
    out = np.empty((n_max, grid.breakpoints.size))
    for n in range(1, n_max + 1):
        weight = previous + log_mu
        below, below_breaks = grid.log_cumulative_left(weight)
        above, above_breaks = grid.log_cumulative_right(right_s + weight)
        factor = math.log(2.0 * n)
        previous = factor + np.logaddexp(above, right_s + below)
        out[n - 1] = factor + np.logaddexp(above_breaks, right_s_breaks + below_breaks)
    with np.errstate(over="ignore"):
        return np.exp(out)


def _regular_recursion(model: DiffusionModel, grid: PanelGrid, n_max: int) -> np.ndarray:
    log_s = log_scale_density(model, grid.nodes)
    log_mu = log_speed_density(model, grid.nodes)
    right_s, right_s_breaks = grid.log_cumulative_right(log_s)
    left_s, left_s_breaks = grid.log_cumulative_left(log_s)
    total = left_s_breaks[-1]
    # p = S[x, xc] / S[D, xc] and 1 - p = S[D, x] / S[D, xc]
    log_p, log_p_breaks = right_s - total, right_s_breaks - total
    log_q, log_q_breaks = left_s - total, left_s_breaks - total

    previous = np.zeros_like(log_s)
    out = np.empty((n_max, grid.breakpoints.size))
    for n in range(1, n_max + 1):
        weight = previous + log_mu
        upper, upper_breaks = grid.log_cumulative_right(right_s + weight)
        lower, lower_breaks = grid.log_cumulative_left(left_s + weight)
        factor = math.log(2.0 * n)
        previous = factor + np.logaddexp(log_q + upper, log_p + lower)
        out[n - 1] = factor + np.logaddexp(log_q_breaks + upper_breaks, log_p_breaks + lower_breaks)
    with np.errstate(over="ignore"):
        return np.exp(out)


def _finite(model: DiffusionModel, values: np.ndarray) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        raise NumericalFailure(f"{model.name}: passage-time moments exceed double precision")
    return values


def _converged(
    model: DiffusionModel,
    recursion: Recursion,
    grid: PanelGrid,
    positions: np.ndarray,
    n_max: int,
    rtol: float,
    atol: float,
) -> tuple[np.ndarray, np.ndarray]:
    values = _finite(model, recursion(model, grid, n_max)[:, positions])
    error = np.full_like(values, np.inf)
    for level in range(MAX_REFINEMENTS):
        grid = grid.refined()
        positions = 2 * positions
        refined = _finite(model, recursion(model, grid, n_max)[:, positions])
        error = np.abs(refined - values)
        values = refined
        logger.debug(f"{model.name}: refinement {level + 1}, {grid.n_panels} panels, max change {error.max():.3g}")
        if np.all(error <= np.maximum(rtol * np.abs(values), atol)):
            return values, error
    logger.warning(
        f"{model.name}: moments not converged after {MAX_REFINEMENTS} refinements "
        f"(max change {error.max():.3g})"
    )
    return values, error


def _check_order(n_max: int) -> None:
    if int(n_max) != n_max or n_max < 1:
        raise DomainError(f"n_max must be a positive integer, got {n_max}")


def _entrance_curve(
    model: DiffusionModel,
    points,
    xc: float,
    n_max: int,
    rtol: float,
    check_boundary: bool,
) -> MomentCurve:
    _check_order(n_max)
    xc = float(xc)
    points = np.atleast_1d(np.asarray(points, dtype=float))
    if not model.left < xc <= model.right:
        raise DomainError(f"{model.name}: target xc={xc} outside ({model.left}, {model.right}]")
    if np.any(np.diff(points) < 0.0):
        raise DomainError(f"{model.name}: start points must be sorted")
    for i, x0 in enumerate(points):
        if not model.left <= x0 <= xc:
            raise DomainError(f"{model.name}: start point #{i} x0={x0} outside [{model.left}, {xc}]")
    if check_boundary:
        require_entrance(model)

    lower = float(_singular_points(model, xc)[-1])
    breaks = _breakpoints(model, lower, xc, np.clip(points, lower, xc))
    positions = locate_breakpoints(breaks, np.clip(points, lower, xc))
    atol = DEFAULT_ATOL_SCALE * (xc - model.left)
    values, error = _converged(model, _entrance_recursion, PanelGrid(breaks), positions, n_max, rtol, atol)

    at_target = points == xc
    values[:, at_target] = 0.0
    error[:, at_target] = 0.0
    return MomentCurve(points, xc, values, error)


def moments_fpt_entrance(
    model: DiffusionModel,
    x0: float,
    xc: float,
    n_max: int,
    *,
    rtol: float = DEFAULT_RTOL,
    check_boundary: bool = True,
) -> MomentCurve:
    """
    Moments M_1..M_n_max of the passage time from x0 to xc when x_l is an
    entrance boundary.

    Raises:
        PreconditionError: if x_l is not an entrance boundary (and S infinite,
            M finite does not hold either); skipped with check_boundary=False
    """
    return _entrance_curve(model, [x0], xc, n_max, rtol, check_boundary)


def mean_fpt_entrance(
    model: DiffusionModel,
    x0: float,
    xc: float,
    *,
    rtol: float = DEFAULT_RTOL,
    check_boundary: bool = True,
) -> float:
    """Mean passage time from x0 in [x_l, xc] to xc for an entrance boundary."""
    curve = _entrance_curve(model, [x0], xc, 1, rtol, check_boundary)
    return float(curve.mean[0])


def moments_fpt_from_boundary(
    model: DiffusionModel,
    xc: float,
    n_max: int,
    *,
    rtol: float = DEFAULT_RTOL,
    check_boundary: bool = True,
) -> MomentCurve:
    """Moments of the passage time to xc starting at the entrance boundary itself."""
    return _entrance_curve(model, [model.left], xc, n_max, rtol, check_boundary)


def mean_fpt_from_boundary(
    model: DiffusionModel,
    xc: float,
    *,
    rtol: float = DEFAULT_RTOL,
    check_boundary: bool = True,
) -> float:
    """M_1(x_l) = 2 int_{x_l}^{xc} S[z, xc] mu(z) dz."""
    curve = _entrance_curve(model, [model.left], xc, 1, rtol, check_boundary)
    return float(curve.mean[0])


def fpt_curve(
    model: DiffusionModel,
    grid,
    xc: float,
    n_max: int = 1,
    *,
    rtol: float = DEFAULT_RTOL,
    check_boundary: bool = True,
) -> MomentCurve:
    """
    Entrance-boundary moments for a sorted grid of start points, all evaluated on
    one shared quadrature grid.
    """
    curve = _entrance_curve(model, grid, xc, n_max, rtol, check_boundary)
    logger.info(f"{model.name}: moment curve over {curve.start_points.size} start points, xc={xc:.6g}")
    return curve


def moments_fpt_regular(
    model: DiffusionModel,
    delta: float,
    x0: float,
    xc: float,
    n_max: int,
    *,
    rtol: float = DEFAULT_RTOL,
) -> MomentCurve:
    """
    Moments of the exit time from (delta, xc) started at x0, both ends absorbing.

    This is the interior-point formula whose delta -> x_l limit gives the
    entrance-boundary moments.
    """
    _check_order(n_max)
    delta, x0, xc = float(delta), float(x0), float(xc)
    if not (model.left < delta < x0 <= xc <= model.right):
        raise DomainError(
            f"{model.name}: need x_l < delta < x0 <= xc <= x_c, got delta={delta}, x0={x0}, xc={xc}"
        )
    points = np.array([x0])
    if x0 == xc:
        zeros = np.zeros((n_max, 1))
        return MomentCurve(points, xc, zeros, zeros.copy())

    breaks = _breakpoints(model, delta, xc, points)
    positions = locate_breakpoints(breaks, points)
    atol = DEFAULT_ATOL_SCALE * (xc - model.left)
    values, error = _converged(model, _regular_recursion, PanelGrid(breaks), positions, n_max, rtol, atol)
    return MomentCurve(points, xc, values, error)


def mean_fpt_regular(
    model: DiffusionModel,
    delta: float,
    x0: float,
    xc: float,
    *,
    rtol: float = DEFAULT_RTOL,
) -> float:
    """Mean exit time from (delta, xc) started at x0."""
    return float(moments_fpt_regular(model, delta, x0, xc, 1, rtol=rtol).mean[0])
