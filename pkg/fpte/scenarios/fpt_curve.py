"""
First-passage moments over a grid of start points.

Models that run in slow time also get M1_t = M1 / eps in original time.
"""

from fpte.fpt.moments import fpt_curve
from fpte.pipelines import Table
from fpte.scenarios.base import Scenario, build_model


class FptCurveScenario(Scenario):
    name = "fpt-curve"

    def run(self):
        built = build_model(self.config, self.threads)
        xc = self.require("grid", "threshold")
        n_max = self.config.get("quadrature", "n_max")
        starts = self.grid()
        curve = fpt_curve(built.model, starts, xc, n_max, rtol=self.rtol, check_boundary=self.check_boundary)

        columns = ["x0"] + [f"M{n}" for n in range(1, n_max + 1)]
        if n_max >= 2:
            columns.append("variance")
        columns.append("quad_err")
        if built.eps is not None:
            columns.append("M1_t")
        table = Table(columns)
        for i, x0 in enumerate(curve.start_points):
            row = [float(x0)] + [float(curve.moment(n)[i]) for n in range(1, n_max + 1)]
            if n_max >= 2:
                row.append(float(curve.variance[i]))
            row.append(float(curve.quadrature_error[0, i]))
            if built.eps is not None:
                row.append(float(curve.mean[i]) / built.eps)
            table.add(*row)
        yield table
