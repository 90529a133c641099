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

__all__ = [
    "HarmonicSource",
    "SpectrumSpec",
    "WhiteCorrelation",
    "autocorrelation",
    "autocorrelation_kernel",
    "load_tabulated_spectrum",
    "make_rng",
    "spectral_paths",
    "spectral_variance",
    "spectrum_value",
    "synthesize_realization",
]
