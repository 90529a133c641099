"""
Scenario base class and model construction from a resolved config.

A scenario is the unit of work of one CLI invocation: it builds its model from
the [model] and [spectrum.*] sections and yields Table objects for the
pipeline.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterator

import numpy as np

from fpte.config import ScenarioConfig
from fpte.diffusion.model import DiffusionModel
from fpte.errors import ConfigError
from fpte.noise.spectra import SpectrumSpec, load_tabulated_spectrum
from fpte.oscillators.colored import duffing_colored_model
from fpte.oscillators.duffing import duffing_white_model
from fpte.oscillators.linear import linear_amplitude_model
from fpte.oscillators.mathieu import ariaratnam_amplitude_model, mathieu_energy_model
from fpte.oscillators.params import DuffingParams, LinearOscParams, MathieuParams
from fpte.pipelines import Table

logger = logging.getLogger(__name__)

# unit-strength white noise, R(s) = delta(s)
UNIT_WHITE = SpectrumSpec.white(1.0 / (2.0 * math.pi))


@dataclass(frozen=True, eq=False)
class BuiltModel:
    """
    A diffusion model with the parameters it came from.

    ``eps`` is set when the model runs in slow time tau = eps t.
    """

    model: DiffusionModel
    eps: float | None = None
    duffing: DuffingParams | None = None
    mathieu: MathieuParams | None = None
    spectra: tuple[SpectrumSpec, SpectrumSpec] | None = None


def build_spectrum(config: ScenarioConfig, channel: str) -> SpectrumSpec:
    section = f"spectrum.{channel}"
    if not config.has(section):
        return UNIT_WHITE
    values = config[section]
    kind = values["kind"]
    if kind == "white":
        return SpectrumSpec.white(values["intensity"])
    if kind == "tabulated":
        return load_tabulated_spectrum(config.resolve_path(values["file"]))
    return SpectrumSpec.exponential_cosine(values["variance"], values["decay"], values["center"])


def build_model(config: ScenarioConfig, threads: int = 1) -> BuiltModel:
    """Construct the [model] family with its resolved parameters."""
    m = config["model"]
    family = m["family"]
    mass = m["left_point_mass"]

    if family == "r-process":
        p = LinearOscParams(d=m["d"], omega_n=m["omega_n"], eps=m["eps"], spectrum_at_omega_n=m["spectrum_at_omega_n"])
        built = BuiltModel(linear_amplitude_model(p, radius=m["radius"]))
    elif family == "constant":
        drift, diffusion = m["drift"], m["diffusion"]
        model = DiffusionModel(
            lambda x: np.full(np.shape(x), drift),
            lambda x: np.full(np.shape(x), diffusion),
            m["left"],
            m["right"],
            name="constant",
        )
        built = BuiltModel(model)
    elif family.startswith("mathieu"):
        spectra = (build_spectrum(config, "xi1"), build_spectrum(config, "xi2"))
        p = MathieuParams.from_spectra(m["alpha1"], m["beta1"], m["nu1"], m["nu2"], m["eps"], *spectra)
        if family == "mathieu-energy":
            model = mathieu_energy_model(p, m["energy_cap"])
        else:
            model = ariaratnam_amplitude_model(p, math.sqrt(2.0 * m["energy_cap"] / p.alpha1))
        built = BuiltModel(model, eps=p.eps, mathieu=p, spectra=spectra)
    else:
        p = DuffingParams(**{k: m[k] for k in ("alpha1", "alpha3", "beta1", "beta2", "beta3", "nu1", "nu2", "eps")})
        if family == "duffing-white":
            built = BuiltModel(duffing_white_model(p), eps=p.eps, duffing=p, spectra=(UNIT_WHITE, UNIT_WHITE))
        else:
            spectra = (build_spectrum(config, "xi1"), build_spectrum(config, "xi2"))
            model = duffing_colored_model(p, *spectra, points=m["table_points"], threads=threads)
            built = BuiltModel(model, eps=p.eps, duffing=p, spectra=spectra)

    if mass is not None:
        built = replace(built, model=replace(built.model, left_point_mass=mass))
    logger.info(f"Built {family} model on ({built.model.left:g}, {built.model.right:.6g})")
    return built


class Scenario:
    """Base class; subclasses set ``name`` to their kind and implement ``run``."""

    name = ""

    def __init__(self, config: ScenarioConfig, output_dir: str | Path, threads: int = 1):
        self.config = config
        self.output_dir = Path(output_dir)
        self.threads = max(1, int(threads))
        self.extra_outputs: list[Path] = []
        self.logger = logging.getLogger(f"fpte.scenarios.{self.name}")

    def run(self) -> Iterator[Table]:
        raise NotImplementedError

    @property
    def rtol(self) -> float:
        return self.config.get("quadrature", "rtol")

    @property
    def check_boundary(self) -> bool:
        return self.config.get("quadrature", "check_boundary")

    def require(self, section: str, key: str):
        value = self.config.get(section, key)
        if value is None:
            raise ConfigError(f"{self.name} scenario requires [{section}] {key}")
        return value

    def grid(self) -> np.ndarray:
        start = self.require("grid", "start")
        stop = self.require("grid", "stop")
        points = self.require("grid", "points")
        if points < 1 or stop < start:
            raise ConfigError(f"[grid] needs points >= 1 and stop >= start, got {points}, {start}..{stop}")
        return np.linspace(start, stop, points)

    @property
    def degrees(self) -> bool:
        return bool(self.config.get("grid", "degrees", False))

    def to_radians(self, values):
        return np.radians(values) if self.degrees else np.asarray(values, dtype=float)

    def angle_column(self, base: str) -> str:
        return f"{base}_deg" if self.degrees else base

    def require_family(self, *prefixes: str) -> None:
        if not self.config.family.startswith(prefixes):
            raise ConfigError(f"{self.name} scenario needs a {' or '.join(prefixes)} model, got {self.config.family}")
