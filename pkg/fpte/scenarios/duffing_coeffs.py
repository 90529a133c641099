"""Drift and diffusion of the averaged Duffing energy process against amplitude."""

import numpy as np

from fpte.errors import ConfigError
from fpte.pipelines import Table
from fpte.scenarios.base import Scenario, build_model


class DuffingCoeffsScenario(Scenario):
    name = "duffing-coeffs"

    def run(self):
        self.require_family("duffing")
        built = build_model(self.config, self.threads)
        p, model = built.duffing, built.model
        angles = self.grid()
        b = self.to_radians(angles)
        if np.any(b < 0.0):
            raise ConfigError("[grid] amplitudes must be non-negative")
        H = np.asarray(p.energy_from_amplitude(b), dtype=float)
        if np.any(H > p.H_guard):
            raise ConfigError(f"[grid] amplitudes reach beyond H_guard={p.H_guard:.6g}")
        drift = model.m(H)
        sigma = np.sqrt(model.sigma_sq(H))

        table = Table([self.angle_column("b"), "H", "drift", "sigma"])
        for row in zip(angles, H, drift, sigma):
            table.add(*(float(v) for v in row))
        yield table
