"""Normalized amplitude process of the linear oscillator under wide-band excitation."""

from __future__ import annotations

import logging

import numpy as np

from fpte.diffusion.model import DiffusionModel
from fpte.errors import DomainError
from fpte.oscillators.params import LinearOscParams

logger = logging.getLogger(__name__)


def linear_amplitude_model(p: LinearOscParams, radius: float = 5.0) -> DiffusionModel:
    """
    dr = c (1/(2r) - r) dt + sqrt(c) dW with c = eps d w_n, on (0, radius).

    r is the physical amplitude divided by ``p.amplitude_scale``. The point r = 0
    is an entrance boundary.
    """
    if not radius > 0.0:
        raise DomainError(f"truncation radius must be positive, got {radius}")
    c = p.time_scale

    def drift(r):
        return c * (0.5 / r - r)

    def diffusion_sq(r):
        return np.full(np.shape(r), c)

    logger.debug(f"r-process with eps*d*omega_n={c:.6g} on (0, {radius:g})")
    return DiffusionModel(drift, diffusion_sq, 0.0, float(radius), name="r-process")
