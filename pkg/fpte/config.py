"""
Scenario configuration: strict INI documents read with configparser.

Every section and key is declared in SCHEMA with its type and default. Unknown
sections, unknown keys, ill-typed values and keys that do not belong to the
chosen model family raise ConfigError. The resolved config keeps the schema
order so that rendering it is deterministic.
"""

from __future__ import annotations

import configparser
import hashlib
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from fpte.constants import COEFF_TABLE_POINTS, DEFAULT_RTOL, HARMONICS
from fpte.errors import ConfigError
from fpte.utils.normalizer import format_cell, normalize_key

logger = logging.getLogger(__name__)

KINDS = (
    "classify",
    "stationary-density",
    "fpt-curve",
    "mathieu-density-compare",
    "duffing-coeffs",
    "duffing-fpt",
    "mc-validate",
)

FAMILIES = ("r-process", "constant", "mathieu-energy", "mathieu-amplitude", "duffing-white", "duffing-colored")

REQUIRED = object()


@dataclass(frozen=True)
class Key:
    type: type | tuple
    default: Any = None
    # choice keys use a tuple of allowed strings as type


_SPECTRUM = {
    "kind": Key(("white", "tabulated", "exponential_cosine"), "white"),
    "intensity": Key(float, 1.0),
    "file": Key(str),
    "variance": Key(float),
    "decay": Key(float),
    "center": Key(float, 0.0),
}

SCHEMA: dict[str, dict[str, Key]] = {
    "scenario": {
        "name": Key(str, REQUIRED),
        "kind": Key(KINDS, REQUIRED),
        "seed": Key(int, 0),
    },
    "model": {
        "family": Key(FAMILIES, REQUIRED),
        "left_point_mass": Key(float),
        # r-process
        "eps": Key(float),
        "d": Key(float),
        "omega_n": Key(float),
        "spectrum_at_omega_n": Key(float),
        "radius": Key(float),
        # constant coefficients
        "drift": Key(float),
        "diffusion": Key(float),
        "left": Key(float),
        "right": Key(float),
        # oscillators
        "alpha1": Key(float),
        "alpha3": Key(float),
        "beta1": Key(float),
        "beta2": Key(float),
        "beta3": Key(float),
        "nu1": Key(float),
        "nu2": Key(float),
        "energy_cap": Key(float),
        "table_points": Key(int),
    },
    "grid": {
        "start": Key(float),
        "stop": Key(float),
        "points": Key(int, 50),
        "threshold": Key(float),
        "degrees": Key(bool, False),
    },
    "quadrature": {
        "rtol": Key(float, DEFAULT_RTOL),
        "n_max": Key(int, 2),
        "check_boundary": Key(bool, True),
    },
    "mc": {
        "n_paths": Key(int, 10_000),
        "dt": Key(float),
        "t_cap": Key(float),
        "full_oscillator": Key(bool, False),
        "harmonics": Key(int, HARMONICS),
        "dump_times": Key(bool, False),
    },
    "spectrum.xi1": _SPECTRUM,
    "spectrum.xi2": _SPECTRUM,
}

# Family-specific model keys and their defaults; None means required
_TABLE1 = {
    "alpha1": 3.187,
    "alpha3": 4.164,
    "beta1": 0.655,
    "beta2": 0.921,
    "beta3": 0.0,
    "nu1": 0.018,
    "nu2": 1.783,
    "eps": 0.1,
}
FAMILY_KEYS: dict[str, dict[str, Any]] = {
    "r-process": {"eps": None, "d": None, "omega_n": None, "spectrum_at_omega_n": 1.0, "radius": 5.0},
    "constant": {"drift": 0.0, "diffusion": None, "left": None, "right": None},
    "mathieu-energy": {"alpha1": None, "beta1": None, "nu1": None, "nu2": None, "eps": None, "energy_cap": None},
    "mathieu-amplitude": {"alpha1": None, "beta1": None, "nu1": None, "nu2": None, "eps": None, "energy_cap": None},
    "duffing-white": dict(_TABLE1),
    "duffing-colored": {**_TABLE1, "table_points": COEFF_TABLE_POINTS},
}
SPECTRUM_FAMILIES = ("mathieu-energy", "mathieu-amplitude", "duffing-colored")
_ALWAYS = ("scenario", "model", "quadrature")
_TRUE = {"1", "true", "yes", "on"}
_FALSE = {"0", "false", "no", "off"}


def _convert(section: str, name: str, key: Key, raw: str):
    text = raw.strip()
    where = f"[{section}] {name}"
    if isinstance(key.type, tuple):
        if text not in key.type:
            raise ConfigError(f"{where}: {text!r} is not one of {', '.join(key.type)}")
        return text
    if key.type is bool:
        if text.lower() in _TRUE:
            return True
        if text.lower() in _FALSE:
            return False
        raise ConfigError(f"{where}: {text!r} is not a boolean")
    if key.type is int:
        try:
            return int(text)
        except ValueError:
            raise ConfigError(f"{where}: {text!r} is not an integer") from None
    if key.type is float:
        try:
            return float(text)
        except ValueError:
            raise ConfigError(f"{where}: {text!r} is not a number") from None
    if not text:
        raise ConfigError(f"{where}: empty value")
    return text


class ScenarioConfig:
    """Validated scenario configuration with schema defaults filled in."""

    def __init__(self, sections: dict[str, dict[str, Any]], source: Path | None = None):
        self.sections = sections
        self.source = source

    def __getitem__(self, section: str) -> dict[str, Any]:
        return self.sections.get(section, {})

    def get(self, section: str, key: str, default=None):
        value = self.sections.get(section, {}).get(key)
        return default if value is None else value

    def has(self, section: str) -> bool:
        return section in self.sections

    @property
    def name(self) -> str:
        return self.sections["scenario"]["name"]

    @property
    def kind(self) -> str:
        return self.sections["scenario"]["kind"]

    @property
    def family(self) -> str:
        return self.sections["model"]["family"]

    @property
    def seed(self) -> int:
        return self.sections["scenario"]["seed"]

    def with_overrides(self, seed: int | None = None, rtol: float | None = None) -> "ScenarioConfig":
        sections = {name: dict(values) for name, values in self.sections.items()}
        if seed is not None:
            if not 0 <= seed < 2**64:
                raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed}")
            sections["scenario"]["seed"] = seed
        if rtol is not None:
            if not rtol > 0.0:
                raise ConfigError(f"tolerance must be positive, got {rtol}")
            sections["quadrature"]["rtol"] = rtol
        return ScenarioConfig(sections, self.source)

    def lines(self) -> list[str]:
        """'section.key = value' for every resolved key, in schema order."""
        out = []
        for section, values in self.sections.items():
            for key, value in values.items():
                if value is not None:
                    out.append(f"{section}.{key} = {format_cell(value)}")
        return out

    def digest(self) -> str:
        return hashlib.sha256("\n".join(self.lines()).encode("utf-8")).hexdigest()

    def resolve_path(self, value: str) -> Path:
        """Paths in a config are relative to the config file."""
        path = Path(value)
        if not path.is_absolute() and self.source is not None:
            path = self.source.parent / path
        return path


def parse_config(text: str, source: Path | None = None) -> ScenarioConfig:
    parser = configparser.ConfigParser(interpolation=None, default_section="__unused__")
    parser.optionxform = str
    try:
        parser.read_string(text, source=str(source) if source else "<config>")
    except configparser.Error as e:
        raise ConfigError(f"malformed config: {e}") from None

    present = {normalize_key(s): s for s in parser.sections()}
    unknown = sorted(set(present) - set(SCHEMA))
    if unknown:
        raise ConfigError(f"unknown section(s): {', '.join(unknown)}")

    sections: dict[str, dict[str, Any]] = {}
    for section, keys in SCHEMA.items():
        if section not in present and section not in _ALWAYS:
            continue
        raw = dict(parser[present[section]]) if section in present else {}
        values: dict[str, Any] = {}
        for raw_key, raw_value in raw.items():
            name = normalize_key(raw_key)
            if name not in keys:
                raise ConfigError(f"[{section}] unknown key {raw_key!r}")
            values[name] = _convert(section, name, keys[name], raw_value)
        resolved = {}
        for name, key in keys.items():
            if name in values:
                resolved[name] = values[name]
            elif key.default is REQUIRED:
                raise ConfigError(f"[{section}] missing required key {name!r}")
            else:
                resolved[name] = key.default
        sections[section] = resolved

    seed = sections["scenario"]["seed"]
    if not 0 <= seed < 2**64:
        raise ConfigError(f"[scenario] seed must be an unsigned 64-bit integer, got {seed}")
    _apply_family(sections)
    for channel in ("spectrum.xi1", "spectrum.xi2"):
        if channel in sections:
            if sections["model"]["family"] not in SPECTRUM_FAMILIES:
                raise ConfigError(f"[{channel}] only applies to families {', '.join(SPECTRUM_FAMILIES)}")
            _check_spectrum(channel, sections[channel])
    return ScenarioConfig(sections, source)


def _apply_family(sections: dict[str, dict[str, Any]]) -> None:
    model = sections["model"]
    family = model["family"]
    allowed = FAMILY_KEYS[family]
    for name, value in model.items():
        if name in ("family", "left_point_mass") or value is None:
            continue
        if name not in allowed:
            raise ConfigError(f"[model] key {name!r} does not apply to family {family!r}")
    for name, default in allowed.items():
        if model[name] is None:
            if default is None:
                raise ConfigError(f"[model] family {family!r} requires {name!r}")
            model[name] = default


def _check_spectrum(channel: str, values: dict[str, Any]) -> None:
    kind = values["kind"]
    needed = {"white": ("intensity",), "tabulated": ("file",), "exponential_cosine": ("variance", "decay")}[kind]
    for name in needed:
        if values[name] is None:
            raise ConfigError(f"[{channel}] kind {kind!r} requires {name!r}")
    irrelevant = {
        "white": ("file", "variance", "decay"),
        "tabulated": ("variance", "decay"),
        "exponential_cosine": ("file",),
    }[kind]
    for name in irrelevant:
        if values[name] is not None:
            raise ConfigError(f"[{channel}] key {name!r} does not apply to kind {kind!r}")
    if kind != "white":
        values["intensity"] = None
    if kind != "exponential_cosine":
        values["center"] = None


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from None
    config = parse_config(text, source=path)
    logger.info(f"Loaded {config.kind} scenario {config.name!r} from {path}")
    return config
