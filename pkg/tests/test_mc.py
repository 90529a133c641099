import math
import os
import time

import numpy as np
import pytest

from fpte.config import load_config
from fpte.errors import DomainError, NumericalFailure
from fpte.fpt.moments import moments_fpt_entrance, moments_fpt_from_boundary
from fpte.mc.compare import compare_stats, passage_time_ks
from fpte.mc.oscillator import simulate_duffing_fpt, verlet_energy_trace
from fpte.mc.simulate import FptStats, dump_passage_times, resolve_t_cap, simulate_fpt_1d
from fpte.noise.spectra import SpectrumSpec
from fpte.oscillators.params import DuffingParams
from fpte.scenarios import get_scenario


def _noisy_duffing():
    return DuffingParams(3.187, 4.164, 0.1, 0.0, 0.0, nu1=1.0, nu2=0.5, eps=0.5)


class TestFptStats:
    def test_censored_entries(self):
        """NaN marks a path that never reached the threshold."""
        stats = FptStats.from_times(np.array([1.0, 2.0, np.nan, 3.0]), 4, 0.01, 10.0)
        assert stats.mean == pytest.approx(2.0)
        assert stats.second_moment == pytest.approx(14.0 / 3.0)
        assert stats.variance == pytest.approx(2.0 / 3.0)
        assert stats.n_censored == 1
        assert stats.censored_fraction == 0.25
        assert stats.flagged

    def test_standard_error(self):
        stats = FptStats.from_times(np.array([1.0, 2.0, 3.0, 4.0]), 4, 0.01, 10.0)
        assert stats.se_mean == pytest.approx(math.sqrt(5.0 / 3.0) / 2.0)
        assert not stats.flagged

    def test_too_few_finished(self):
        with pytest.raises(NumericalFailure):
            FptStats.from_times(np.array([1.0, np.nan, np.nan]), 3, 0.01, 10.0)

    def test_scaled(self):
        stats = FptStats.from_times(np.array([1.0, 2.0, np.nan, 3.0]), 4, 0.01, 10.0).scaled(2.0)
        assert stats.mean == pytest.approx(4.0)
        assert stats.variance == pytest.approx(8.0 / 3.0)
        assert stats.n_censored == 1
        assert (stats.dt, stats.t_cap) == (0.02, 20.0)

    def test_t_cap_resolution(self):
        assert resolve_t_cap(None, 2.0) == pytest.approx(2e4)
        assert resolve_t_cap(5.0, None) == 5.0
        with pytest.raises(DomainError):
            resolve_t_cap(None, None)

    def test_dump_passage_times(self, tmp_path):
        stats = FptStats.from_times(np.array([0.5, np.nan, 1.25]), 3, 0.01, 10.0)
        path = dump_passage_times(tmp_path / "mc" / "times.txt", stats)
        assert path.read_text().startswith("# passage times, 1 censored")
        np.testing.assert_array_equal(np.loadtxt(path), [0.5, 1.25])


class TestCompare:
    def _stats(self):
        return FptStats.from_times(np.array([1.0, 2.0, 3.0, 4.0]), 4, 0.01, 10.0)

    def test_exact_moments_pass(self):
        """The sample gives M1 = 2.5 and M2 = 7.5."""
        report = compare_stats(2.5, 7.5, self._stats())
        assert report.passed
        assert report.z_mean == 0.0
        assert report.rel_variance == pytest.approx(0.0, abs=1e-12)

    def test_far_mean_fails(self):
        stats = self._stats()
        shifted = 2.5 + 5.0 * stats.se_mean
        report = compare_stats(shifted, 7.5 - 6.25 + shifted**2, stats)
        assert not report.passed
        assert report.z_mean == pytest.approx(-5.0)

    def test_band_rule(self):
        """A 50 % band absorbs the same offset."""
        stats = self._stats()
        shifted = 2.5 + 5.0 * stats.se_mean
        report = compare_stats(shifted, 1.25 + shifted**2, stats, band=0.5)
        assert report.passed
        assert "0.5" in report.rule

    def test_flagged_run_never_passes(self):
        """One path in four censored: the finished sample matches M1 = 2 and M2 = 14/3 exactly, yet the run fails."""
        stats = FptStats.from_times(np.array([1.0, 2.0, np.nan, 3.0]), 4, 0.01, 10.0)
        assert stats.flagged
        report = compare_stats(2.0, 14.0 / 3.0, stats)
        assert report.z_mean == 0.0
        assert not report.passed
        assert report.rule.startswith("flagged")
        assert not compare_stats(2.0, 14.0 / 3.0, stats, band=0.5).passed

    def test_ks(self):
        rng = np.random.default_rng(0)
        sample = rng.exponential(1.0, 2000)
        _, p_same, same = passage_time_ks(sample, sample[::-1])
        _, p_shift, shifted_same = passage_time_ks(sample, sample + 0.5)
        assert same and p_same == pytest.approx(1.0)
        assert not shifted_same and p_shift < 1e-6


class TestDiffusionSimulation:
    def test_thread_count_does_not_change_result(self, r_process):
        kwargs = dict(dt=2e-3, n_paths=1500, t_cap=50.0, seed=9)
        serial = simulate_fpt_1d(r_process, 1.0, 1.5, threads=1, **kwargs)
        threaded = simulate_fpt_1d(r_process, 1.0, 1.5, threads=2, **kwargs)
        np.testing.assert_array_equal(serial.times, threaded.times)
        assert serial == threaded

    def test_start_on_threshold(self, r_process):
        stats = simulate_fpt_1d(r_process, 1.5, 1.5, n_paths=10, t_cap=1.0)
        assert stats.mean == 0.0 and stats.n_censored == 0

    def test_domain_errors(self, r_process):
        with pytest.raises(DomainError):
            simulate_fpt_1d(r_process, 2.0, 1.5, t_cap=1.0)
        with pytest.raises(DomainError):
            simulate_fpt_1d(r_process, 0.5, 1.5)
        with pytest.raises(DomainError):
            simulate_fpt_1d(r_process, 0.5, 1.5, dt=-1.0, t_cap=1.0)

    def test_time_scale_halves_passage_times(self, r_process):
        """Doubling the coefficients with half the step replays the same paths at half the time."""
        slow = simulate_fpt_1d(r_process, 1.0, 1.5, dt=4e-3, n_paths=500, t_cap=60.0, seed=4)
        fast = simulate_fpt_1d(r_process.with_time_scale(2.0), 1.0, 1.5, dt=2e-3, n_paths=500, t_cap=30.0, seed=4)
        assert fast.mean == pytest.approx(0.5 * slow.mean, rel=0.02)
        assert passage_time_ks(fast.times, 0.5 * slow.times)[2]

    @pytest.mark.slow
    def test_rprocess_against_quadrature(self, r_process):
        """Passage 0 -> 1.5 has M1 about 2.25."""
        curve = moments_fpt_from_boundary(r_process, 1.5, 2)
        stats = simulate_fpt_1d(r_process, 0.0, 1.5, dt=1e-3, n_paths=4000, seed=1, m1_hint=curve.mean[0])
        report = compare_stats(curve.mean[0], curve.moment(2)[0], stats, band=0.03)
        assert report.passed, report

    @pytest.mark.slow
    def test_interior_start_against_quadrature(self, r_process):
        curve = moments_fpt_entrance(r_process, 1.0, 2.0, 2)
        stats = simulate_fpt_1d(r_process, 1.0, 2.0, dt=1e-3, n_paths=4000, seed=2, m1_hint=curve.mean[0])
        assert compare_stats(curve.mean[0], curve.moment(2)[0], stats, band=0.03).passed

    @pytest.mark.slow
    def test_step_rate_meets_budget(self, r_process):
        """2048 paths from 0 to 2.2 at dt = 1e-4, scaled by 1e5 / 2048 and by the 7.1 mean-time ratio of
        the eight validation starts to the boundary start, fit the five-minute budget."""
        threads = os.cpu_count() or 1
        simulate_fpt_1d(r_process, 0.0, 0.5, dt=1e-3, n_paths=4, t_cap=10.0)
        started = time.perf_counter()
        stats = simulate_fpt_1d(r_process, 0.0, 2.2, dt=1e-4, n_paths=2048, m1_hint=16.65, seed=3, threads=threads)
        elapsed = time.perf_counter() - started
        assert stats.mean == pytest.approx(16.65, rel=0.1)
        assert elapsed * 1e5 / 2048 * 7.1 < 300.0

    @pytest.mark.slow
    def test_validation_scenario(self, scenarios_dir, tmp_path):
        """Eight starts in [0, 2] to xc = 2.2 with 1e5 paths at dt = 1e-4: every mean and variance
        within 3 se of the quadrature moments, in under five minutes."""
        config = load_config(scenarios_dir / "rprocess_mc_validate.cfg")
        started = time.perf_counter()
        (table,) = list(get_scenario(config.kind)(config, tmp_path, threads=os.cpu_count() or 1).run())
        elapsed = time.perf_counter() - started
        assert len(table.rows) == 8
        passed = table.columns.index("passed")
        assert all(row[passed] for row in table.rows), table.rows
        assert elapsed < 300.0


class TestOscillatorSimulation:
    def test_verlet_energy_is_bounded(self):
        """Without damping or noise the energy error stays bounded over a thousand periods."""
        p = DuffingParams(3.187, 4.164, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        energies = verlet_energy_trace(p, 0.3, p.small_oscillation_period / 200.0, 200_000)
        assert np.max(np.abs(energies - 0.3)) < 2e-3
        early = np.max(np.abs(energies[:1000] - 0.3))
        late = np.max(np.abs(energies[-1000:] - 0.3))
        assert late < 2.0 * early + 1e-12

    def test_verlet_rejects_escape_energy(self, table1):
        with pytest.raises(DomainError):
            verlet_energy_trace(table1, table1.H_crit, 0.01, 10)

    def test_thread_count_does_not_change_result(self):
        p = _noisy_duffing()
        white = SpectrumSpec.white(0.5)
        kwargs = dict(n_paths=1100, t_cap=40.0, seed=5)
        serial = simulate_duffing_fpt(p, white, white, 0.0, 0.1, threads=1, **kwargs)
        threaded = simulate_duffing_fpt(p, white, white, 0.0, 0.1, threads=2, **kwargs)
        np.testing.assert_array_equal(serial.times, threaded.times)
        assert serial.mean > 0.0

    def test_colored_excitation_is_reproducible(self):
        p = _noisy_duffing()
        colored = SpectrumSpec.exponential_cosine(1.0, 0.5, 1.8)
        first = simulate_duffing_fpt(p, colored, colored, 0.0, 0.1, n_paths=64, t_cap=80.0, seed=3, harmonics=64)
        second = simulate_duffing_fpt(p, colored, colored, 0.0, 0.1, n_paths=64, t_cap=80.0, seed=3, harmonics=64)
        np.testing.assert_array_equal(first.times, second.times)

    def test_start_above_level(self):
        p = _noisy_duffing()
        white = SpectrumSpec.white(0.5)
        stats = simulate_duffing_fpt(p, white, white, 0.2, 0.1, n_paths=8, t_cap=1.0)
        assert stats.mean == 0.0

    def test_level_beyond_saddle(self, table1):
        white = SpectrumSpec.white(0.5)
        with pytest.raises(DomainError):
            simulate_duffing_fpt(table1, white, white, 0.0, table1.H_crit, t_cap=1.0)
