"""Boundary classification of the configured model's left end."""

from fpte.diffusion.measures import classify_left_boundary
from fpte.pipelines import Table
from fpte.scenarios.base import Scenario, build_model


class ClassifyScenario(Scenario):
    name = "classify"

    def run(self):
        built = build_model(self.config, self.threads)
        kind = classify_left_boundary(built.model)
        self.logger.info(f"{built.model.name}: left boundary is {kind.value}")
        table = Table(["quantity", "value"])
        table.add("left_boundary", kind.value)
        yield table
