"""
Energy-averaged versus amplitude-averaged stationary densities of the Mathieu
oscillator, both expressed as densities of the amplitude b.
"""

import math

import numpy as np

from fpte.diffusion.measures import stationary_density
from fpte.errors import ConfigError
from fpte.oscillators.mathieu import amplitude_density_from_energy, ariaratnam_amplitude_model, mathieu_energy_model
from fpte.pipelines import Table
from fpte.scenarios.base import Scenario, build_model


class MathieuDensityCompareScenario(Scenario):
    name = "mathieu-density-compare"

    def run(self):
        self.require_family("mathieu")
        built = build_model(self.config, self.threads)
        p = built.mathieu
        energy_cap = self.config.get("model", "energy_cap")
        energy = mathieu_energy_model(p, energy_cap)
        amplitude = ariaratnam_amplitude_model(p, math.sqrt(2.0 * energy_cap / p.alpha1))

        b = self.grid()
        if b[0] <= 0.0 or b[-1] >= amplitude.right:
            raise ConfigError(f"[grid] amplitudes must lie in (0, {amplitude.right:.6g})")
        p_energy = np.asarray(amplitude_density_from_energy(lambda H: stationary_density(energy, H), p.alpha1)(b))
        p_amplitude = np.asarray(stationary_density(amplitude, b))
        diff = np.abs(p_energy - p_amplitude)
        self.logger.info(f"Mathieu densities: max |difference| {diff.max():.3g}")

        table = Table(["b", "p_energy", "p_ariaratnam", "absdiff"])
        for row in zip(b, p_energy, p_amplitude, diff):
            table.add(*(float(v) for v in row))
        yield table
