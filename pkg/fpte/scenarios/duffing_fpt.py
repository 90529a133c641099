"""
Mean capsize time of the averaged Duffing energy process against the initial
amplitude b0, in slow time tau and original time t = tau / eps.
"""

import numpy as np

from fpte.errors import ConfigError
from fpte.fpt.moments import fpt_curve
from fpte.pipelines import Table
from fpte.scenarios.base import Scenario, build_model


class DuffingFptScenario(Scenario):
    name = "duffing-fpt"

    def run(self):
        self.require_family("duffing")
        built = build_model(self.config, self.threads)
        p, model = built.duffing, built.model
        angles = self.grid()
        b0 = self.to_radians(angles)
        b_c = float(self.to_radians(self.require("grid", "threshold")))
        H_c = float(p.energy_from_amplitude(b_c))
        if not 0.0 < H_c <= model.right:
            raise ConfigError(f"[grid] threshold energy {H_c:.6g} outside (0, {model.right:.6g}]")
        if b0[0] < 0.0 or b0[-1] > b_c:
            raise ConfigError("[grid] start amplitudes must lie in [0, threshold]")
        H0 = np.asarray(p.energy_from_amplitude(b0), dtype=float)
        H0 = np.minimum(H0, H_c)

        curve = fpt_curve(model, H0, H_c, 1, rtol=self.rtol, check_boundary=self.check_boundary)
        table = Table([self.angle_column("b0"), "H0", "M1_tau", "M1_t", "quad_err"])
        for i, angle in enumerate(angles):
            m1 = float(curve.mean[i])
            table.add(float(angle), float(H0[i]), m1, m1 / p.eps, float(curve.quadrature_error[0, i]))
        yield table
