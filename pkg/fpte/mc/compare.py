"""Agreement checks between quadrature moments and Monte Carlo statistics."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats as scipy_stats

from fpte.constants import CENSOR_LIMIT, Z_THRESHOLD
from fpte.mc.simulate import FptStats

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ComparisonReport:
    z_mean: float
    z_variance: float
    rel_mean: float
    rel_variance: float
    passed: bool
    rule: str


def _z(sample: float, reference: float, se: float) -> float:
    if se > 0.0:
        return (sample - reference) / se
    return 0.0 if sample == reference else float(np.copysign(np.inf, sample - reference))


def _relative(sample: float, reference: float) -> float:
    return abs(sample - reference) / abs(reference) if reference != 0.0 else abs(sample)


def compare_stats(
    quadrature_M1: float, quadrature_M2: float, stats: FptStats, band: float | None = None
) -> ComparisonReport:
    """
    z-scores of the sample mean and variance against M1 and M2 - M1^2.

    A moment passes when |sample - quadrature| <= 3 se, or, with ``band``, when
    it lies within 3 se plus ``band`` times the quadrature value.
    A flagged run, with at least CENSOR_LIMIT of its paths censored, never
    passes; its rule names the censored fraction.
    """
    quad_var = quadrature_M2 - quadrature_M1**2
    z_mean = _z(stats.mean, quadrature_M1, stats.se_mean)
    z_var = _z(stats.variance, quad_var, stats.se_variance)
    if band is None:
        rule = f"|z| <= {Z_THRESHOLD:g}"
        passed = abs(z_mean) <= Z_THRESHOLD and abs(z_var) <= Z_THRESHOLD
    else:
        rule = f"|diff| <= {Z_THRESHOLD:g} se + {band:g} |quadrature|"
        passed = (
            abs(stats.mean - quadrature_M1) <= Z_THRESHOLD * stats.se_mean + band * abs(quadrature_M1)
            and abs(stats.variance - quad_var) <= Z_THRESHOLD * stats.se_variance + band * abs(quad_var)
        )
    if stats.flagged:
        logger.warning(f"comparing against a flagged run ({stats.n_censored} censored paths), marking it failed")
        rule = f"flagged: {stats.censored_fraction:.3g} censored >= {CENSOR_LIMIT:g}"
        passed = False
    report = ComparisonReport(
        z_mean=float(z_mean),
        z_variance=float(z_var),
        rel_mean=_relative(stats.mean, quadrature_M1),
        rel_variance=_relative(stats.variance, quad_var),
        passed=bool(passed),
        rule=rule,
    )
    logger.debug(f"comparison: {report}")
    return report


def passage_time_ks(first: np.ndarray, second: np.ndarray, alpha: float = 0.05) -> tuple[float, float, bool]:
    """Two-sample Kolmogorov-Smirnov test; returns (distance, p-value, indistinguishable at alpha)."""
    result = scipy_stats.ks_2samp(np.asarray(first, dtype=float), np.asarray(second, dtype=float))
    return float(result.statistic), float(result.pvalue), bool(result.pvalue > alpha)
