"""Scenario configuration: flat ``section.key = value`` text files.

Example::

    # impulsive noise every 100 symbols
    noise.p = 0.01
    sweep.schemes = sh, mh2, idf

Values are layered: built-in defaults, then an optional preset, then the
config file, then ``--set`` overrides from the command line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Mapping, Optional

from .channel import AttenuationParams, FadingParams, NoiseParams
from .energy import ModemPowerProfile
from .montecarlo import SimConfig
from .outage import parse_scheme

SWEEP_VARIABLES = ("distance", "static_power", "outage_target", "impulse_probability")
METRICS = ("outage", "energy")


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending line or key."""


def _float_list(text: str) -> tuple:
    return tuple(float(v) for v in text.split(",") if v.strip())


def _str_list(text: str) -> tuple:
    return tuple(v.strip() for v in text.split(",") if v.strip())


def _bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _int(text: str) -> int:
    value = float(text)
    if not value.is_integer():
        raise ValueError(f"not an integer: {text!r}")
    return int(value)


@dataclass(frozen=True)
class KeySpec:
    parse: Callable[[str], Any]
    default: str
    help: str
    source: str


_PUB = "published"
_ASSUMED = "assumed"
_TOOL = "tool"

SCHEMA: dict[str, KeySpec] = {
    "attenuation.a0": KeySpec(float, "9.4e-3", "attenuation constant a0 (1/m)", _PUB),
    "attenuation.a1": KeySpec(float, "4.2e-7", "attenuation constant a1 (1/m per f^k)", _PUB),
    "attenuation.k": KeySpec(float, "0.7", "frequency exponent k", _PUB),
    "attenuation.f": KeySpec(float, "30", "operating frequency (MHz)", _PUB),
    "attenuation.f_unit": KeySpec(str, "MHz", "unit of f inside a1*f^k: MHz or Hz", _ASSUMED),
    "noise.p": KeySpec(float, "0.01", "impulsive noise probability", _PUB),
    "noise.sbnr_db": KeySpec(float, "25", "signal to background noise ratio (dB)", _PUB),
    "noise.sinr_db": KeySpec(float, "-15", "signal to impulsive noise ratio (dB)", _PUB),
    "fading.mu": KeySpec(float, "3", "mean of 10*log10(h) (dB)", _PUB),
    "fading.sigma": KeySpec(float, repr(math.sqrt(2.0)),
                            "std of 10*log10(h) (dB); variance 2 dB^2 read as sigma=sqrt(2)",
                            _ASSUMED),
    "profile.p_static_tx": KeySpec(float, "0.5", "static power of a transmitting modem (W)",
                                   _ASSUMED),
    "profile.p_static_rx": KeySpec(float, "0.5", "static power of a receiving modem (W)",
                                   _ASSUMED),
    "profile.bandwidth": KeySpec(float, "30e6", "system bandwidth (Hz)", _PUB),
    "profile.xi": KeySpec(float, "1", "spectral efficiency (bits/s/Hz)", _ASSUMED),
    "scenario.outage_target": KeySpec(float, "0.01", "target outage O* for power solving", _PUB),
    "scenario.power": KeySpec(float, "1", "transmit power (W) for fixed-power outage runs",
                              _ASSUMED),
    "scenario.distance": KeySpec(float, "400", "source-destination distance (m)", _TOOL),
    "scenario.scheme": KeySpec(str, "sh", "scheme for single-point commands: sh, mhN, idf",
                               _TOOL),
    "solver.tol": KeySpec(float, "1e-10", "bisection tolerance on the outage residual", _TOOL),
    "sweep.variable": KeySpec(str, "distance", "swept axis: " + ", ".join(SWEEP_VARIABLES),
                              _TOOL),
    "sweep.metric": KeySpec(str, "outage",
                            "outage (fixed power) or energy (solve power for O*)", _TOOL),
    "sweep.start": KeySpec(float, "100", "first sweep value", _TOOL),
    "sweep.stop": KeySpec(float, "1200", "last sweep value", _TOOL),
    "sweep.steps": KeySpec(_int, "12", "number of sweep points (>= 2)", _TOOL),
    "sweep.scale": KeySpec(str, "linear", "point spacing: linear or log", _TOOL),
    "sweep.schemes": KeySpec(_str_list, "sh, mh2, mh3, mh4, idf",
                             "comma-separated schemes: sh, mhN (N >= 2), idf", _TOOL),
    "sweep.family": KeySpec(str, "", "optional second axis (one of the sweep variables)",
                            _TOOL),
    "sweep.family_values": KeySpec(_float_list, "", "values of the second axis", _TOOL),
    "sweep.workers": KeySpec(_int, "1", "threads evaluating sweep points", _TOOL),
    "mc.validate": KeySpec(_bool, "false", "add Monte Carlo columns to sweeps", _TOOL),
    "mc.trials": KeySpec(_int, "1000000", "Monte Carlo trials per estimate", _TOOL),
    "mc.seed": KeySpec(_int, "0", "Monte Carlo seed (64-bit)", _TOOL),
    "mc.workers": KeySpec(_int, "1", "threads per Monte Carlo estimate", _TOOL),
}

PRESETS: dict[str, dict[str, str]] = {
    # outage vs distance for 1..4 hops
    "fig2": {
        "sweep.metric": "outage", "sweep.variable": "distance",
        "sweep.start": "100", "sweep.stop": "1200", "sweep.steps": "12",
        "sweep.schemes": "sh, mh2, mh3, mh4",
    },
    # dual-hop DF vs IDF for several impulse probabilities
    "fig3": {
        "sweep.metric": "outage", "sweep.variable": "distance",
        "sweep.start": "100", "sweep.stop": "1200", "sweep.steps": "12",
        "sweep.schemes": "mh2, idf",
        "sweep.family": "impulse_probability", "sweep.family_values": "0.001, 0.01, 0.1",
    },
    # energy per bit vs distance
    "fig4": {
        "sweep.metric": "energy", "sweep.variable": "distance",
        "sweep.start": "100", "sweep.stop": "1200", "sweep.steps": "12",
        "sweep.schemes": "sh, mh2, mh3, mh4, idf",
    },
    # energy per bit vs static power at 100 m
    "fig5": {
        "sweep.metric": "energy", "sweep.variable": "static_power",
        "sweep.start": "0.001", "sweep.stop": "2", "sweep.steps": "34", "sweep.scale": "log",
        "scenario.distance": "100",
        "sweep.schemes": "sh, mh2, mh3, mh4, idf",
    },
    # energy per bit vs outage target at 100 m
    "fig6": {
        "sweep.metric": "energy", "sweep.variable": "outage_target",
        "sweep.start": "1e-4", "sweep.stop": "1e-1", "sweep.steps": "13", "sweep.scale": "log",
        "scenario.distance": "100",
        "sweep.schemes": "sh, mh2, mh3, mh4, idf",
    },
}


@dataclass(frozen=True)
class SweepSpec:
    variable: str = "distance"
    metric: str = "outage"
    start: float = 100.0
    stop: float = 1200.0
    steps: int = 12
    scale: str = "linear"
    schemes: tuple = ("sh", "mh2", "mh3", "mh4", "idf")
    family: Optional[str] = None
    family_values: tuple = ()
    validate_mc: bool = False
    mc: SimConfig = SimConfig()
    workers: int = 1

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ValueError(f"sweep variable must be one of {SWEEP_VARIABLES}")
        if self.metric not in METRICS:
            raise ValueError(f"sweep metric must be one of {METRICS}")
        if not self.start < self.stop:
            raise ValueError("sweep start must be < stop")
        if self.steps < 2:
            raise ValueError("sweep needs at least 2 steps")
        if self.scale not in ("linear", "log"):
            raise ValueError("sweep scale must be 'linear' or 'log'")
        if self.scale == "log" and not self.start > 0:
            raise ValueError("log-spaced sweep needs start > 0")
        if not self.schemes:
            raise ValueError("sweep needs at least one scheme")
        for scheme in self.schemes:
            parse_scheme(scheme)
        if self.family is not None:
            if self.family not in SWEEP_VARIABLES or self.family == self.variable:
                raise ValueError("sweep family must be a sweep variable other than the swept one")
            if not self.family_values:
                raise ValueError("sweep family given without family values")
        if self.workers < 1:
            raise ValueError("sweep workers must be >= 1")


@dataclass(frozen=True)
class ScenarioConfig:
    attenuation: AttenuationParams = AttenuationParams()
    noise: NoiseParams = NoiseParams()
    fading: FadingParams = FadingParams()
    profile: ModemPowerProfile = ModemPowerProfile()
    outage_target: float = 0.01
    power: float = 1.0
    distance: float = 400.0
    scheme: str = "sh"
    tol: float = 1e-10
    sweep: SweepSpec = SweepSpec()

    def __post_init__(self):
        if not 0.0 < self.outage_target < 1.0:
            raise ValueError("outage target must lie in (0, 1)")
        if not self.power > 0:
            raise ValueError("power must be > 0")
        if not self.distance > 0:
            raise ValueError("distance must be > 0")
        if not self.tol > 0:
            raise ValueError("solver tolerance must be > 0")
        parse_scheme(self.scheme)

    @property
    def xi(self) -> float:
        return self.profile.xi


def parse_text(text: str, origin: str = "<config>") -> dict[str, tuple[str, str]]:
    """Parse config text into ``{key: (raw value, location)}``."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        where = f"{origin}:{lineno}"
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"{where}: unknown key {key!r}")
        entries[key] = (value, where)
    return entries


def parse_overrides(items) -> dict[str, tuple[str, str]]:
    entries = {}
    for item in items or ():
        if "=" not in item:
            raise ConfigError(f"--set {item!r}: expected key=value")
        key, value = (part.strip() for part in item.split("=", 1))
        if key not in SCHEMA:
            raise ConfigError(f"--set {item!r}: unknown key {key!r}")
        entries[key] = (value, f"--set {key}")
    return entries


def _section_error(section: str, located: Mapping[str, tuple[Any, str]], exc: Exception):
    keys = [f"{k} ({where})" for k, (_, where) in located.items()
            if k.startswith(section + ".") and where != "default"]
    detail = "; ".join(keys) if keys else "defaults"
    return ConfigError(f"invalid [{section}] settings: {exc} -- from {detail}")


def build_config(entries: Mapping[str, tuple[str, str]]) -> ScenarioConfig:
    """Turn layered raw entries into a validated :class:`ScenarioConfig`."""
    located: dict[str, tuple[Any, str]] = {}
    for key, spec in SCHEMA.items():
        raw, where = entries.get(key, (spec.default, "default"))
        try:
            located[key] = (spec.parse(raw), where)
        except ValueError as exc:
            raise ConfigError(f"{where}: bad value for {key}: {exc}") from None
    v = {k: val for k, (val, _) in located.items()}

    def make(section, factory, **kwargs):
        try:
            return factory(**kwargs)
        except ValueError as exc:
            raise _section_error(section, located, exc) from None

    att = make("attenuation", AttenuationParams, a0=v["attenuation.a0"], a1=v["attenuation.a1"],
               k=v["attenuation.k"], f=v["attenuation.f"], f_unit=v["attenuation.f_unit"])
    noise = make("noise", NoiseParams, p=v["noise.p"], sbnr_db=v["noise.sbnr_db"],
                 sinr_db=v["noise.sinr_db"])
    fading = make("fading", FadingParams, mu=v["fading.mu"], sigma=v["fading.sigma"])
    profile = make("profile", ModemPowerProfile, p_static_tx=v["profile.p_static_tx"],
                   p_static_rx=v["profile.p_static_rx"], bandwidth=v["profile.bandwidth"],
                   xi=v["profile.xi"])
    mc = make("mc", SimConfig, trials=v["mc.trials"], seed=v["mc.seed"], workers=v["mc.workers"])
    sweep = make("sweep", SweepSpec, variable=v["sweep.variable"], metric=v["sweep.metric"],
                 start=v["sweep.start"], stop=v["sweep.stop"], steps=v["sweep.steps"],
                 scale=v["sweep.scale"], schemes=v["sweep.schemes"],
                 family=v["sweep.family"] or None, family_values=v["sweep.family_values"],
                 validate_mc=v["mc.validate"], mc=mc, workers=v["sweep.workers"])
    return make("scenario", ScenarioConfig, attenuation=att, noise=noise, fading=fading,
                profile=profile, outage_target=v["scenario.outage_target"],
                power=v["scenario.power"], distance=v["scenario.distance"],
                scheme=v["scenario.scheme"], tol=v["solver.tol"], sweep=sweep)


def load_config(path=None, preset: Optional[str] = None, overrides=None) -> ScenarioConfig:
    entries: dict[str, tuple[str, str]] = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {sorted(PRESETS)}")
        entries.update({k: (val, f"preset {preset}") for k, val in PRESETS[preset].items()})
    if path is not None:
        path = Path(path)
        entries.update(parse_text(path.read_text(encoding="utf-8"), str(path)))
    entries.update(parse_overrides(overrides))
    return build_config(entries)


def dump_schema() -> str:
    """Every key with its default, meaning and where the default comes from."""
    lines = [
        "# key = default    # meaning [source]",
        "# source: published = stated with the channel/noise model;"
        " assumed = not stated there, chosen here; tool = harness setting",
    ]
    width = max(len(k) + len(s.default) for k, s in SCHEMA.items()) + 3
    for key, spec in SCHEMA.items():
        lhs = f"{key} = {spec.default}"
        lines.append(f"{lhs:<{width}}  # {spec.help} [{spec.source}]")
    return "\n".join(lines) + "\n"
