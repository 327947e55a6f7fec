"""Run configuration: defaults, TOML files and ``key=value`` overrides.

Precedence is flags > file > defaults. Every key must exist in
``DEFAULTS``; anything else is a typo and is rejected with its dotted path.
"""
from __future__ import annotations

import copy
import math
import sys

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover - depends on interpreter
    import tomli as tomllib

from .damping import PRESETS, CollapseParams, DampingMode
from .model import DEFAULT_DM2, NeutrinoModel, Scenario, mixing_from_angles

__all__ = ["ConfigError", "DEFAULTS", "load_config", "build_params", "build_model", "build_scenario"]

#: two-flavor angle used when no mixing is given, sin^2(theta) = 0.307
DEFAULT_THETA = math.asin(math.sqrt(0.307))

DEFAULTS = {
    "mode": "EXPONENTIAL",
    "seed": 0,
    "collapse": {"preset": "ADLER", "gamma": None, "r_C": None, "m0c2": None},
    "model": {"dm2": [DEFAULT_DM2], "lightest": 0.0, "angles": None, "mixing": None, "widths": None},
    "scenario": {"energy": 1e19, "momentum": None, "time": 3.15e18, "baseline": None, "flavor": 0},
    "output": {"format": "csv", "path": None},
    "scan": {"axis": "energy", "grid": None, "start": None, "stop": None, "points": 13},
    "dp": {"masses": None, "energy": 1e19, "distance": 1e25, "cutoff": "WEAK_SCALE",
           "points": 12, "min_mass": 0.05, "max_mass": 2.2},
    "decoherence": {"atmosphere_time": 1e-4},
    "check": {"include_violated": False, "rtol": 1e-9, "mc_draws": 100},
    "montecarlo": {"rate": 0.1, "d_omega": 0.0, "n_paths": 100000, "dt": 0.01, "t_max": 10.0,
                   "n_batches": 16, "workers": 1, "backend": None},
}


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending key path."""

    def __init__(self, key: str, message: str):
        super().__init__(f"{key}: {message}")
        self.key = key


def _merge(base: dict, new: dict, prefix: str = "") -> None:
    for key, value in new.items():
        path = f"{prefix}{key}"
        if key not in base:
            raise ConfigError(path, "unknown key")
        if isinstance(base[key], dict):
            if not isinstance(value, dict):
                raise ConfigError(path, "expected a table")
            _merge(base[key], value, path + ".")
        else:
            base[key] = value


def _parse_value(text: str):
    try:
        return tomllib.loads(f"v = {text}")["v"]
    except tomllib.TOMLDecodeError:
        return text


def parse_override(item: str) -> dict:
    """``"a.b=1e3"`` -> ``{"a": {"b": 1000.0}}``."""
    if "=" not in item:
        raise ConfigError(item, "override must look like key=value")
    key, _, text = item.partition("=")
    parts = key.strip().split(".")
    if not all(parts):
        raise ConfigError(key, "malformed key")
    value = _parse_value(text.strip())
    for part in reversed(parts):
        value = {part: value}
    return value


def load_config(path=None, overrides=()) -> dict:
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path, "rb") as fh:
                data = tomllib.load(fh)
        except OSError as exc:
            raise ConfigError("--config", str(exc)) from None
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError("--config", f"invalid TOML: {exc}") from None
        _merge(cfg, data)
    for item in overrides:
        _merge(cfg, parse_override(item))
    return cfg


def _number(cfg: dict, section: str, key: str, allow_none: bool = True):
    value = cfg[section][key] if section else cfg[key]
    path = f"{section}.{key}" if section else key
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(path, f"expected a number, got {value!r}")
    return float(value)


def build_params(cfg: dict) -> CollapseParams:
    c = cfg["collapse"]
    if c["preset"] not in PRESETS:
        raise ConfigError("collapse.preset", f"unknown preset {c['preset']!r}; expected {sorted(PRESETS)}")
    base = PRESETS[c["preset"]]
    vals = {k: _number(cfg, "collapse", k) for k in ("gamma", "r_C", "m0c2")}
    try:
        return CollapseParams(
            gamma=base.gamma if vals["gamma"] is None else vals["gamma"],
            r_C=base.r_C if vals["r_C"] is None else vals["r_C"],
            m0c2=base.m0c2 if vals["m0c2"] is None else vals["m0c2"],
        )
    except ValueError as exc:
        raise ConfigError("collapse", str(exc)) from None


def build_model(cfg: dict) -> NeutrinoModel:
    m = cfg["model"]
    dm2 = m["dm2"]
    if not isinstance(dm2, list) or not dm2:
        raise ConfigError("model.dm2", "expected a non-empty list of squared-mass splittings")
    n = len(dm2) + 1
    lightest = _number(cfg, "model", "lightest", allow_none=False)
    try:
        if m["mixing"] is not None:
            if m["angles"] is not None:
                raise ConfigError("model.mixing", "give either mixing or angles, not both")
            mixing = m["mixing"]
        elif m["angles"] is not None:
            mixing = mixing_from_angles(m["angles"], n)
        else:
            mixing = mixing_from_angles([DEFAULT_THETA] + [0.0] * (n * (n - 1) // 2 - 1), n)
        return NeutrinoModel.from_splittings(dm2, lightest, mixing=mixing, widths=m["widths"])
    except ConfigError:
        raise
    except (ValueError, TypeError) as exc:
        raise ConfigError("model", str(exc)) from None


def build_scenario(cfg: dict) -> Scenario:
    s = cfg["scenario"]
    energy = _number(cfg, "scenario", "energy")
    momentum = _number(cfg, "scenario", "momentum")
    time = _number(cfg, "scenario", "time")
    baseline = _number(cfg, "scenario", "baseline")
    if momentum is not None:
        energy = None  # an explicit momentum replaces the default energy label
    if baseline is not None:
        time = None
    flavor = s["flavor"]
    if isinstance(flavor, bool) or not isinstance(flavor, int):
        raise ConfigError("scenario.flavor", f"expected an integer, got {flavor!r}")
    try:
        return Scenario(momentum_c=momentum, energy=energy, flight_time=time, baseline=baseline,
                        initial_flavor=flavor)
    except ValueError as exc:
        raise ConfigError("scenario", str(exc)) from None


def build_mode(cfg: dict) -> DampingMode:
    try:
        return DampingMode(str(cfg["mode"]).upper())
    except ValueError:
        raise ConfigError("mode", f"expected LINEAR or EXPONENTIAL, got {cfg['mode']!r}") from None
