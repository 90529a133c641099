import math
from pathlib import Path

import numpy as np
import pytest
from scipy import integrate

from fpte.errors import DomainError
from fpte.noise.spectra import (
    SpectrumSpec,
    WhiteCorrelation,
    autocorrelation,
    autocorrelation_kernel,
    load_tabulated_spectrum,
    spectral_variance,
    spectrum_value,
)
from fpte.noise.synthesis import HarmonicSource, make_rng, spectral_paths, synthesize_realization

REPO_ROOT = Path(__file__).resolve().parents[1]


def _numeric_autocorrelation(spec, s):
    """R(s) = 2 int_0^inf S(w) cos(ws) dw by scipy quadrature."""
    if s == 0.0:
        value, _ = integrate.quad(lambda w: spectrum_value(spec, w), 0.0, np.inf, limit=200)
    else:
        value, _ = integrate.quad(lambda w: spectrum_value(spec, w), 0.0, np.inf, weight="cos", wvar=s)
    return 2.0 * value


class TestSpectra:
    def test_exponential_cosine_pair(self):
        """S and R = v e^{-lambda |s|} cos(Omega s) are a Fourier pair."""
        spec = SpectrumSpec.exponential_cosine(1.5, 0.8, 2.0)
        for s in (0.0, 0.3, 1.7, 4.0):
            assert autocorrelation(spec, s) == pytest.approx(_numeric_autocorrelation(spec, s), rel=1e-6, abs=1e-9)

    def test_exponential_cosine_is_even(self):
        spec = SpectrumSpec.exponential_cosine(1.0, 1.0, 2.0)
        assert spectrum_value(spec, -1.3) == spectrum_value(spec, 1.3)
        assert autocorrelation(spec, -0.7) == autocorrelation(spec, 0.7)

    def test_tabulated_pair(self):
        """Closed-form segment sums agree with direct quadrature of the interpolated table."""
        spec = SpectrumSpec.tabulated([0.0, 0.5, 1.0, 2.0], [0.0, 0.4, 0.3, 0.0])
        for s in (0.0, 0.05, 1.0, 6.0):
            numeric, _ = integrate.quad(
                lambda w: spectrum_value(spec, w) * math.cos(w * s), 0.0, 2.0, points=[0.5, 1.0], limit=200
            )
            assert autocorrelation(spec, s) == pytest.approx(2.0 * numeric, rel=1e-9, abs=1e-12)

    def test_tabulated_variance(self):
        """R(0) is twice the trapezoid area of the table."""
        spec = SpectrumSpec.tabulated([0.0, 1.0, 2.0], [1.0, 1.0, 0.0])
        assert spectral_variance(spec) == pytest.approx(3.0)
        assert autocorrelation(spec, 0.0) == pytest.approx(3.0, rel=1e-12)

    def test_tabulated_is_zero_outside_grid(self):
        spec = SpectrumSpec.tabulated([1.0, 2.0], [1.0, 1.0])
        assert spectrum_value(spec, 0.5) == 0.0
        assert spectrum_value(spec, 2.5) == 0.0

    def test_white(self):
        """White noise of intensity S0 has R = 2 pi S0 delta."""
        spec = SpectrumSpec.white(0.25)
        assert spectrum_value(spec, 10.0) == 0.25
        assert math.isinf(spectral_variance(spec))
        marker = autocorrelation_kernel(spec)
        assert isinstance(marker, WhiteCorrelation)
        assert marker.strength == pytest.approx(0.5 * math.pi)

    def test_kernel_is_vectorized(self):
        spec = SpectrumSpec.exponential_cosine(2.0, 1.0, 0.0)
        kernel = autocorrelation_kernel(spec)
        np.testing.assert_allclose(kernel(np.array([0.0, 1.0])), [2.0, 2.0 * math.exp(-1.0)])

    @pytest.mark.parametrize(
        "build",
        [
            lambda: SpectrumSpec.white(-1.0),
            lambda: SpectrumSpec.exponential_cosine(1.0, 0.0, 1.0),
            lambda: SpectrumSpec.tabulated([0.0, 1.0, 1.0], [1.0, 1.0, 1.0]),
            lambda: SpectrumSpec.tabulated([0.0, 1.0], [1.0, -1.0]),
        ],
    )
    def test_invalid_spectra(self, build):
        with pytest.raises(DomainError):
            build()

    def test_load_standin_file(self):
        """The bundled stand-in roll spectrum: 201 rows on [0, 4], zero at both ends."""
        spec = load_tabulated_spectrum(REPO_ROOT / "data" / "standin_roll_spectrum.txt")
        assert spec.omega.size == 201
        assert spec.values[0] == 0.0 and spec.values[-1] == 0.0
        assert spectral_variance(spec) > 0.0

    def test_load_rejects_wrong_columns(self, tmp_path):
        path = tmp_path / "three.txt"
        path.write_text("0 1 2\n1 1 2\n")
        with pytest.raises(DomainError):
            load_tabulated_spectrum(path)


class TestSynthesis:
    def test_same_seed_same_path(self):
        spec = SpectrumSpec.exponential_cosine(1.0, 1.0, 2.0)
        first = synthesize_realization(spec, 0.05, 300, seed=11)
        second = synthesize_realization(spec, 0.05, 300, seed=11)
        np.testing.assert_array_equal(first, second)
        assert not np.array_equal(first, synthesize_realization(spec, 0.05, 300, seed=12))

    def test_ensemble_variance(self):
        """Each harmonic carries var / N_h, so the ensemble variance is R(0)."""
        spec = SpectrumSpec.exponential_cosine(2.0, 1.0, 2.0)
        paths = spectral_paths(spec, 0.05, 8, 2000, seed=3)
        assert np.var(paths[:, 0]) == pytest.approx(2.0, rel=0.15)
        assert abs(np.mean(paths[:, 5])) < 0.25

    def test_blocks_are_consistent(self):
        """Reading a path in two pieces gives the same samples as one read."""
        spec = SpectrumSpec.tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
        source = HarmonicSource(spec, 0.1, 3, seed=5, harmonics=64)
        whole = source.block(0, 40)
        pieces = np.hstack((source.block(0, 15), source.block(15, 25)))
        np.testing.assert_allclose(pieces, whole, atol=1e-12)

    def test_frequencies_inside_table(self):
        spec = SpectrumSpec.tabulated([0.5, 1.0, 1.5], [0.0, 1.0, 0.0])
        source = HarmonicSource(spec, 0.1, 1, seed=0, harmonics=128)
        assert source.frequencies.min() >= 0.5
        assert source.frequencies.max() <= 1.5

    def test_white_is_rejected(self):
        with pytest.raises(DomainError):
            HarmonicSource(SpectrumSpec.white(1.0), 0.1, 1, seed=0)

    def test_streams_are_independent(self):
        a = make_rng(7, 0).standard_normal(4)
        b = make_rng(7, 1).standard_normal(4)
        np.testing.assert_array_equal(a, make_rng(7, 0).standard_normal(4))
        assert not np.array_equal(a, b)
