import math
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate

from fpte.errors import DomainError
from fpte.noise.spectra import SpectrumSpec, WhiteCorrelation
from fpte.numerics.quadrature import PanelGrid
from fpte.numerics.specfun import jacobi_elliptic
from fpte.oscillators.colored import (
    correlation_integrals,
    duffing_colored_model,
    duffing_colored_table,
    fold_reflections,
    folded_drift_integrals,
)
from fpte.oscillators.duffing import (
    chebyshev_energies,
    duffing_damping_average,
    duffing_geometry,
    duffing_orbit,
    duffing_white_coefficients,
    duffing_white_model,
    quarter_period_average,
    white_terms,
)
from fpte.oscillators.params import DuffingParams


class TestGeometry:
    def test_small_oscillation_limit(self, table1):
        """At H = 0: k = 0, q = sqrt(alpha1), T = 2 pi / sqrt(alpha1) = 3.52."""
        g = duffing_geometry(0.0, table1)
        assert g.k == 0.0
        assert g.q == pytest.approx(math.sqrt(table1.alpha1), rel=1e-14)
        assert g.T == pytest.approx(2.0 * math.pi / math.sqrt(3.187), rel=1e-14)
        assert g.T == pytest.approx(3.52, abs=5e-3)

    def test_amplitude_matches_params(self, table1):
        g = duffing_geometry(0.529, table1)
        assert g.b == pytest.approx(0.6977, abs=1e-4)
        assert g.b == pytest.approx(table1.amplitude(0.529), rel=1e-14)

    def test_orbit_stays_on_level_set(self, table1):
        """x = b sn(qt), y = b q cn dn conserves H."""
        H = 0.45
        t = np.linspace(0.0, 10.0, 101)
        x, y = duffing_orbit(t, H, table1)
        np.testing.assert_allclose(table1.hamiltonian(x, y), H, rtol=1e-12)

    def test_orbit_period(self, table1):
        H = 0.5
        g = duffing_geometry(H, table1)
        x0, y0 = duffing_orbit(0.0, H, table1)
        x1, y1 = duffing_orbit(g.T, H, table1)
        assert x1 == pytest.approx(x0, abs=1e-10)
        assert y1 == pytest.approx(y0, rel=1e-10)

    def test_period_grows_towards_separatrix(self, table1):
        """T increases with H and exceeds 5 T(0) at H_crit (1 - 1e-10)."""
        energies = np.linspace(0.0, 0.99, 12) * table1.H_crit
        periods = duffing_geometry(energies, table1).T
        assert np.all(np.diff(periods) > 0.0)
        near = duffing_geometry(table1.H_crit * (1.0 - 1e-10), table1)
        assert near.T > 5.0 * table1.small_oscillation_period

    def test_rejects_energy_outside_well(self, table1):
        with pytest.raises(DomainError):
            duffing_geometry(table1.H_crit, table1)
        with pytest.raises(DomainError):
            duffing_geometry(-1e-3, table1)


class TestPeriodAverages:
    def test_closed_forms_match_quadrature(self, table1):
        """B1 = <y^2>, B2 = <y^2 x^2>, B3 = <y^2 x^4> against Gauss-Legendre period averages."""
        H = np.array([1e-3, 0.2, 0.55])
        g = duffing_geometry(H, table1)
        B1, B2, B3, _ = white_terms(g)
        two_H = 2.0 * H[:, None]
        b2 = (g.b**2)[:, None]
        avg1 = quarter_period_average(lambda sn, cn, dn: two_H * (cn * dn) ** 2, g)
        avg2 = quarter_period_average(lambda sn, cn, dn: two_H * (cn * dn) ** 2 * b2 * sn**2, g)
        avg3 = quarter_period_average(lambda sn, cn, dn: two_H * (cn * dn) ** 2 * b2**2 * sn**4, g)
        np.testing.assert_allclose(B1, avg1, rtol=1e-8)
        np.testing.assert_allclose(B2, avg2, rtol=1e-6)
        np.testing.assert_allclose(B3, avg3, rtol=1e-5)

    def test_time_average_by_scipy(self, table1):
        """<y^2> over one period of the orbit, integrated in t with scipy."""
        H = 0.4
        g = duffing_geometry(H, table1)
        value, _ = integrate.quad(
            lambda t: duffing_orbit(t, H, table1)[1] ** 2, 0.0, g.T, epsabs=0.0, epsrel=1e-12, limit=200
        )
        B1 = white_terms(g)[0]
        assert B1 == pytest.approx(value / g.T, rel=1e-9)

    def test_damping_average_matches_closed_form(self, table1):
        """With beta2 = 0 the damping average is -(beta1 + 2 beta3 H) B1 + alpha1 beta3 B2 - alpha3 beta3 B3 / 2."""
        p = replace(table1, beta2=0.0, beta3=0.3, nu1=0.0, nu2=0.0)
        H = np.array([0.05, 0.3, 0.58])
        drift, sigma_sq = duffing_white_coefficients(H, p)
        np.testing.assert_allclose(duffing_damping_average(H, p), drift, rtol=1e-7)
        np.testing.assert_allclose(sigma_sq, 0.0)

    def test_quadratic_damping_small_energy(self, table1):
        """Near H = 0 the orbit is harmonic: <|y|^3> = (2H)^{3/2} 4 / (3 pi)."""
        p = replace(table1, beta1=0.0, beta2=1.0)
        H = 1e-6
        assert duffing_damping_average(H, p) == pytest.approx(-((2 * H) ** 1.5) * 4.0 / (3.0 * math.pi), rel=1e-5)


class TestWhiteModel:
    def test_small_energy_diffusion(self, table1):
        """sigma^2 / (nu1^2 H) -> 1 + nu2^2 H / (2 alpha1 nu1^2); 1.00094 at H = 1e-6 H_crit."""
        H = 1e-6 * table1.H_crit
        _, sigma_sq = duffing_white_coefficients(H, table1)
        ratio = sigma_sq / (table1.nu1**2 * H)
        expected = 1.0 + table1.nu2**2 * H / (2.0 * table1.alpha1 * table1.nu1**2)
        assert ratio == pytest.approx(expected, rel=1e-5)
        assert ratio == pytest.approx(1.00094, abs=1e-5)

    def test_drift_at_zero_energy(self, table1):
        """Only the additive term survives: m(0) = nu1^2 / 2."""
        drift, sigma_sq = duffing_white_coefficients(0.0, table1)
        assert drift == pytest.approx(0.5 * table1.nu1**2, rel=1e-12)
        assert sigma_sq == 0.0

    def test_guard_band(self, table1):
        with pytest.raises(DomainError):
            duffing_white_coefficients(table1.H_crit * (1.0 - 1e-7), table1)

    def test_model_interval(self, table1):
        model = duffing_white_model(table1)
        assert model.left == 0.0
        assert model.right == pytest.approx(table1.H_guard)
        H = np.array([0.1, 0.4])
        drift, sigma_sq = duffing_white_coefficients(H, table1)
        np.testing.assert_allclose(model.m(H), drift, rtol=1e-6)
        np.testing.assert_allclose(model.sigma_sq(H), sigma_sq, rtol=1e-12)

    def test_needs_noise(self, table1):
        with pytest.raises(DomainError):
            duffing_white_model(replace(table1, nu1=0.0, nu2=0.0))

    def test_chebyshev_energies(self):
        nodes = chebyshev_energies(2.0, 5)
        np.testing.assert_allclose(nodes, [0.0, 1.0 - math.sqrt(0.5), 1.0, 1.0 + math.sqrt(0.5), 2.0])


class TestColoredIntegrals:
    def test_reflections(self, table1):
        """The folded values agree with direct evaluation at K -/+ w and 3K -/+ w."""
        g = duffing_geometry(0.4, table1)
        w = np.array([0.1, 0.7, 1.3])
        for center, c in (("K", g.K), ("3K", 3.0 * g.K)):
            below, above = fold_reflections(w, g.k, g.kc, center)
            direct_below = jacobi_elliptic(c - w, g.k, g.kc)
            direct_above = jacobi_elliptic(c + w, g.k, g.kc)
            np.testing.assert_allclose(below, direct_below, atol=1e-12)
            np.testing.assert_allclose(above, direct_above, atol=1e-12)

    def test_fold_centre_does_not_matter(self, table1):
        """The integrand has period 2K, so folding about K or 3K gives the same F1, F2."""
        g = duffing_geometry(0.3, table1)
        v = np.linspace(-3.0, 3.0, 7)
        at_K = folded_drift_integrals(g, v, 128, "K")
        at_3K = folded_drift_integrals(g, v, 128, "3K")
        np.testing.assert_allclose(at_K[0], at_3K[0], rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(at_K[1], at_3K[1], rtol=1e-10, atol=1e-12)

    def test_zero_shift(self, table1):
        """F1(0) = 2K and G1(0) = int_0^K cn^2 dn^2."""
        g = duffing_geometry(0.3, table1)
        F1, _ = folded_drift_integrals(g, np.zeros(1), 64)
        assert F1[0] == pytest.approx(2.0 * g.K, rel=1e-12)
        G1, _ = correlation_integrals(g, np.zeros(1), 64)
        expected = quarter_period_average(lambda sn, cn, dn: (cn * dn) ** 2, g) * g.K
        assert G1[0] == pytest.approx(float(expected), rel=1e-10)

    def test_bad_centre(self, table1):
        g = duffing_geometry(0.3, table1)
        with pytest.raises(DomainError):
            fold_reflections(np.array([0.1]), g.k, g.kc, "2K")


class TestColoredTable:
    def test_white_kernels_reproduce_white_model(self, table1):
        """Unit-strength delta kernels give exactly the white-noise coefficients."""
        table = duffing_colored_table(table1, WhiteCorrelation(1.0), WhiteCorrelation(1.0), points=9)
        drift, sigma_sq = duffing_white_coefficients(table.energies[:-1], table1)
        np.testing.assert_allclose(table.drift[:-1], drift, rtol=1e-6, atol=1e-12)
        np.testing.assert_allclose(table.sigma_sq[1:-1], sigma_sq[1:], rtol=1e-10)
        assert table.sigma_sq_over_H[0] == pytest.approx(table1.nu1**2)
        assert table.lag_cutoff == 0.0

    def test_zero_kernels_leave_damping(self, table1):
        """Without excitation sigma^2 = 0 and the drift is the damping average."""
        table = duffing_colored_table(table1, None, lambda s: np.zeros_like(s), points=7)
        np.testing.assert_array_equal(table.sigma_sq_over_H, 0.0)
        np.testing.assert_allclose(table.drift, duffing_damping_average(table.energies, table1), rtol=1e-9)

    def test_narrow_kernel_approaches_white(self):
        """R(s) = (lambda / 2) e^{-lambda |s|} has unit area; at lambda = 200 it acts like a delta."""
        p = DuffingParams(alpha1=3.187, alpha3=4.164, beta1=0.0, beta2=0.0, beta3=0.0, nu1=1.0, nu2=0.5, eps=0.1)
        lam = 200.0

        def kernel(s):
            return 0.5 * lam * np.exp(-lam * np.abs(s))

        colored = duffing_colored_table(p, kernel, kernel, points=7)
        white = duffing_colored_table(p, WhiteCorrelation(1.0), WhiteCorrelation(1.0), points=7)
        np.testing.assert_allclose(colored.drift[:-1], white.drift[:-1], rtol=0.05)
        np.testing.assert_allclose(colored.sigma_sq_over_H[:-1], white.sigma_sq_over_H[:-1], rtol=0.05)
        assert 0.0 < colored.lag_cutoff < p.small_oscillation_period

    def test_threads_do_not_change_results(self, table1):
        spec = SpectrumSpec.exponential_cosine(0.01, 1.0, 2.0)
        serial = duffing_colored_table(table1, spec, spec, points=5)
        parallel = duffing_colored_table(table1, spec, spec, points=5, threads=3)
        np.testing.assert_array_equal(serial.drift, parallel.drift)
        np.testing.assert_array_equal(serial.sigma_sq_over_H, parallel.sigma_sq_over_H)

    def test_colored_model(self, table1):
        spec = SpectrumSpec.exponential_cosine(0.01, 1.0, 2.0)
        model = duffing_colored_model(table1, spec, spec, points=9)
        table = model.cached("coefficient_table", lambda: None)
        np.testing.assert_allclose(model.m(table.energies[1:-1]), table.drift[1:-1], rtol=1e-12)
        np.testing.assert_allclose(model.sigma_sq(table.energies[1:-1]), table.sigma_sq[1:-1], rtol=1e-12)
        assert np.all(table.sigma_sq_over_H > 0.0)

    def test_harmonic_sums_match_lag_quadrature(self):
        """The colored coefficients equal the lag integrals of R1 F1(-qs), R2 F2(-qs) and the G terms
        evaluated by direct quadrature over [0, 30], where R(s) = e^{-|s|} cos 2s has decayed to 1e-13."""
        p = DuffingParams(3.187, 4.164, 0.0, 0.0, 0.0, nu1=1.0, nu2=0.5, eps=0.1)

        def kernel(s):
            return np.exp(-np.abs(s)) * np.cos(2.0 * s)

        table = duffing_colored_table(p, kernel, kernel, points=3)
        H = table.energies[1]
        g = duffing_geometry(H, p)
        q, T, b2 = float(g.q), float(g.T), float(g.b) ** 2

        grid = PanelGrid(np.linspace(0.0, 30.0, 121))
        s = grid.nodes.ravel()
        w = (grid.half[:, None] * grid.rule.weights[None, :]).ravel() * kernel(s)
        F1, F2 = folded_drift_integrals(g, -q * s, 256)
        G1p, G2p = correlation_integrals(g, q * s, 256)
        G1m, G2m = correlation_integrals(g, -q * s, 256)
        drift = 2.0 / (T * q) * np.sum(w * (p.nu1**2 * F1 + b2 * p.nu2**2 * F2))
        spread = 4.0 * float(g.b_sq_over_H) * q / T * np.sum(
            w * (p.nu1**2 * (G1p + G1m) + b2 * p.nu2**2 * (G2p + G2m))
        )
        assert table.drift[1] == pytest.approx(drift, rel=1e-4)
        assert table.sigma_sq_over_H[1] == pytest.approx(spread, rel=1e-4)
