"""Normalized stationary density of the configured model on a grid."""

from fpte.diffusion.measures import stationary_density
from fpte.pipelines import Table
from fpte.scenarios.base import Scenario, build_model


class StationaryDensityScenario(Scenario):
    name = "stationary-density"

    def run(self):
        built = build_model(self.config, self.threads)
        x = self.grid()
        p = stationary_density(built.model, x)
        table = Table(["x", "p"])
        for xi, pi in zip(x, p):
            table.add(float(xi), float(pi))
        yield table
