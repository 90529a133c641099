"""
Quadrature moments against Monte Carlo passage times at each grid start point.

For Duffing families with [mc] full_oscillator the oracle is the full
second-order oscillator; its times are converted to slow time and the check is
widened by AVERAGING_BAND for the averaging error.
"""

import numpy as np

from fpte.constants import AVERAGING_BAND, HARMONICS
from fpte.fpt.moments import fpt_curve
from fpte.mc.compare import compare_stats
from fpte.mc.oscillator import simulate_duffing_fpt
from fpte.mc.simulate import dump_passage_times, simulate_fpt_1d
from fpte.pipelines import Table
from fpte.scenarios.base import Scenario, build_model

COLUMNS = [
    "x0",
    "M1",
    "mc_mean",
    "se_mean",
    "z_mean",
    "variance",
    "mc_variance",
    "se_variance",
    "z_variance",
    "censored",
    "passed",
]


class McValidateScenario(Scenario):
    name = "mc-validate"

    def _point_seed(self, index: int) -> int:
        return int(np.random.SeedSequence([self.config.seed, index]).generate_state(1)[0])

    def run(self):
        built = build_model(self.config, self.threads)
        model = built.model
        mc = self.config["mc"]
        full = bool(mc.get("full_oscillator")) and built.duffing is not None
        if mc.get("full_oscillator") and built.duffing is None:
            self.require_family("duffing")

        starts = self.grid()
        threshold = self.require("grid", "threshold")
        if built.duffing is not None and self.degrees:
            starts = np.asarray(built.duffing.energy_from_amplitude(np.radians(starts)), dtype=float)
            threshold = float(built.duffing.energy_from_amplitude(np.radians(threshold)))
        curve = fpt_curve(model, starts, threshold, 2, rtol=self.rtol, check_boundary=self.check_boundary)

        table = Table(COLUMNS)
        n_paths = mc.get("n_paths", 10_000)
        for i, x0 in enumerate(curve.start_points):
            m1, m2 = float(curve.moment(1)[i]), float(curve.moment(2)[i])
            if full:
                p = built.duffing
                stats = simulate_duffing_fpt(
                    p,
                    *built.spectra,
                    H0=float(x0),
                    H_c=threshold,
                    dt=mc.get("dt"),
                    n_paths=n_paths,
                    t_cap=mc.get("t_cap"),
                    seed=self._point_seed(i),
                    harmonics=mc.get("harmonics") or HARMONICS,
                    m1_hint=m1 / p.eps,
                    threads=self.threads,
                ).scaled(p.eps)
                report = compare_stats(m1, m2, stats, band=AVERAGING_BAND)
            else:
                stats = simulate_fpt_1d(
                    model,
                    float(x0),
                    threshold,
                    dt=mc.get("dt"),
                    n_paths=n_paths,
                    t_cap=mc.get("t_cap"),
                    seed=self._point_seed(i),
                    m1_hint=m1,
                    threads=self.threads,
                )
                report = compare_stats(m1, m2, stats)
            self.logger.info(f"x0={x0:.6g}: z_mean={report.z_mean:.2f}, z_var={report.z_variance:.2f} ({report.rule})")
            if mc.get("dump_times"):
                path = self.output_dir / f"{self.config.name}.times.{i}.txt"
                self.extra_outputs.append(dump_passage_times(path, stats))
            table.add(
                float(x0),
                m1,
                stats.mean,
                stats.se_mean,
                report.z_mean,
                m2 - m1**2,
                stats.variance,
                stats.se_variance,
                report.z_variance,
                stats.n_censored,
                report.passed,
            )
        yield table
