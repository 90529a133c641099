import math

import numpy as np
import pytest
from scipy import special

from fpte.errors import DomainError
from fpte.numerics.specfun import (
    EULER_GAMMA,
    complete_elliptic_E,
    complete_elliptic_K,
    elliptic_deficit,
    exponential_integral_Ei,
    jacobi_elliptic,
)


class TestCompleteIntegrals:
    def test_K_matches_scipy(self):
        """K(k) agrees with scipy's ellipk(m = k^2)."""
        k = np.array([0.0, 0.1, 0.5, 0.9, 0.99, 0.9999])
        np.testing.assert_allclose(complete_elliptic_K(k), special.ellipk(k**2), rtol=1e-13)

    def test_E_matches_scipy(self):
        """E(k) agrees with scipy's ellipe(m = k^2), including E(1) = 1."""
        k = np.array([0.0, 0.3, 0.7, 0.95, 1.0])
        np.testing.assert_allclose(complete_elliptic_E(k), special.ellipe(k**2), rtol=1e-13)

    def test_K_near_one_from_complement(self):
        """With k' = 1e-5 given directly, K matches ellipkm1(k'^2) = K(1 - k'^2)."""
        kc = 1e-5
        k = math.sqrt(1.0 - kc * kc)
        assert complete_elliptic_K(k, kc) == pytest.approx(special.ellipkm1(kc * kc), rel=1e-12)

    def test_scalar_in_scalar_out(self):
        """Scalar moduli give plain floats."""
        assert isinstance(complete_elliptic_K(0.5), float)
        assert isinstance(elliptic_deficit(0.5), float)

    def test_K_rejects_k_one(self):
        """K diverges at k = 1."""
        with pytest.raises(DomainError):
            complete_elliptic_K(1.0)

    def test_rejects_modulus_outside_unit_interval(self):
        """Moduli outside [0, 1] are a domain error."""
        with pytest.raises(DomainError):
            complete_elliptic_E(1.5)

    def test_legendre_relation(self):
        """E(k) K(k') + E(k') K(k) - K(k) K(k') = pi / 2 with k' = sqrt(1 - k^2)."""
        k = np.random.default_rng(11).uniform(0.0, 1.0, 20)
        kc = np.sqrt(1.0 - k * k)
        K, E = complete_elliptic_K(k, kc), complete_elliptic_E(k, kc)
        Kc, Ec = complete_elliptic_K(kc, k), complete_elliptic_E(kc, k)
        np.testing.assert_allclose(E * Kc + Ec * K - K * Kc, 0.5 * math.pi, rtol=0.0, atol=1e-10)


class TestEllipticDeficit:
    def test_matches_ratio(self):
        """1 - E/K for moderate k."""
        k = np.array([0.2, 0.6, 0.9])
        expected = 1.0 - special.ellipe(k**2) / special.ellipk(k**2)
        np.testing.assert_allclose(elliptic_deficit(k), expected, rtol=1e-12)

    def test_small_modulus_has_no_cancellation(self):
        """1 - E/K = k^2/2 + k^4/16 + ... keeps full relative accuracy at k = 1e-6."""
        k = 1e-6
        assert elliptic_deficit(k) == pytest.approx(0.5 * k * k + k**4 / 16.0, rel=1e-12)

    def test_zero_and_one(self):
        """The deficit is 0 at k = 0 and 1 at k = 1."""
        assert elliptic_deficit(0.0) == 0.0
        assert elliptic_deficit(1.0) == 1.0


class TestJacobiElliptic:
    def test_matches_scipy(self):
        """sn, cn, dn agree with scipy's ellipj on a grid of (u, k)."""
        u = np.linspace(-4.0, 7.0, 23)
        for k in (0.0, 0.3, 0.8, 0.999):
            sn, cn, dn, _ = special.ellipj(u, k * k)
            triple = jacobi_elliptic(u, k)
            np.testing.assert_allclose(triple.sn, sn, atol=1e-12)
            np.testing.assert_allclose(triple.cn, cn, atol=1e-12)
            np.testing.assert_allclose(triple.dn, dn, atol=1e-12)

    def test_identities(self):
        """sn^2 + cn^2 = 1 and dn^2 + k^2 sn^2 = 1."""
        u = np.linspace(0.0, 10.0, 41)
        k = 0.9
        sn, cn, dn = jacobi_elliptic(u, k)
        np.testing.assert_allclose(sn**2 + cn**2, 1.0, atol=1e-14)
        np.testing.assert_allclose(dn**2 + k**2 * sn**2, 1.0, atol=1e-14)

    def test_quarter_period(self):
        """sn(K) = 1 and cn(K) = 0."""
        k = 0.7
        K = complete_elliptic_K(k)
        sn, cn, dn = jacobi_elliptic(K, k)
        assert sn == pytest.approx(1.0, abs=1e-14)
        assert cn == pytest.approx(0.0, abs=1e-13)
        assert dn == pytest.approx(math.sqrt(1.0 - k * k), rel=1e-13)

    def test_hyperbolic_limit(self):
        """At k = 1 the functions become tanh, sech, sech."""
        u = np.array([0.0, 0.5, 3.0])
        sn, cn, dn = jacobi_elliptic(u, 1.0)
        np.testing.assert_allclose(sn, np.tanh(u))
        np.testing.assert_allclose(cn, 1.0 / np.cosh(u))
        np.testing.assert_allclose(dn, 1.0 / np.cosh(u))

    def test_rejects_non_finite_argument(self):
        with pytest.raises(DomainError):
            jacobi_elliptic(np.inf, 0.5)


class TestExponentialIntegral:
    def test_matches_scipy_across_branch_switch(self):
        """Ei agrees with scipy's expi on both sides of the series/asymptotic switch."""
        x = np.array([1e-3, 0.1, 1.0, 4.84, 20.0, 39.9, 40.1, 100.0, 500.0])
        np.testing.assert_allclose(exponential_integral_Ei(x), special.expi(x), rtol=1e-10)

    def test_small_argument(self):
        """Ei(x) -> gamma + ln x as x -> 0."""
        x = 1e-10
        assert exponential_integral_Ei(x) == pytest.approx(EULER_GAMMA + math.log(x), rel=1e-12)

    def test_rejects_non_positive(self):
        with pytest.raises(DomainError):
            exponential_integral_Ei(0.0)
