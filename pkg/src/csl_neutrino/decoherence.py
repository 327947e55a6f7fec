"""Order-of-magnitude environmental decoherence of flavor oscillations.

Rates follow ``Lambda ~ n v sigma`` with v = c, summed over the
flavor-sensitive channels: electron-neutrino scattering on electrons and
on relic neutrinos. Proton scattering is neutral-current only and affects
all flavors alike, so it is left out.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Sequence

from .constants import CONSTANTS, PhysicalConstants

__all__ = [
    "ATMOSPHERE",
    "ATMOSPHERE_CROSSING_TIME",
    "Channel",
    "CrossSectionSet",
    "DEFAULT_CROSS_SECTIONS",
    "Environment",
    "OUTER_SPACE",
    "cross_section",
    "decoherence_damping",
    "decoherence_rate",
    "flight_path",
]


class Channel(str, Enum):
    NUE_E = "nue-e"
    NUMU_E = "numu-e"
    NUE_NUE = "nue-nue"
    NUE_NUMU = "nue-numu"


@dataclass(frozen=True)
class CrossSectionSet:
    """Linear-in-energy cross sections, sigma / (E/GeV), in cm^2."""

    nue_e: float = 7e-42
    numu_e: float = 1e-42
    nue_nue: float = 2.8e-47
    nue_numu: float = 4e-48

    def __post_init__(self):
        for name in ("nue_e", "numu_e", "nue_nue", "nue_numu"):
            if not getattr(self, name) > 0:
                raise ValueError(f"cross-section coefficient {name} must be > 0")

    def coefficient(self, channel: Channel) -> float:
        return getattr(self, Channel(channel).name.lower())


DEFAULT_CROSS_SECTIONS = CrossSectionSet()


def cross_section(pair, E: float, xs: CrossSectionSet = DEFAULT_CROSS_SECTIONS) -> float:
    """Cross section in cm^2 for channel ``pair`` at neutrino energy ``E`` (eV)."""
    try:
        channel = Channel(pair)
    except ValueError:
        raise ValueError(f"unknown channel {pair!r}; expected one of {[c.value for c in Channel]}") from None
    if not E > 0:
        raise ValueError("energy must be positive")
    return xs.coefficient(channel) * (E / 1e9)


@dataclass(frozen=True)
class Environment:
    """Scattering targets, cm^-3, and the typical crossing time, s."""

    label: str
    electron_density: float
    neutrino_density: float = 1e2
    traversal_time: float = 0.0
    channels: tuple = field(default=((Channel.NUE_E, "electron"), (Channel.NUE_NUE, "neutrino")))

    def __post_init__(self):
        if self.electron_density < 0 or self.neutrino_density < 0:
            raise ValueError("densities must be >= 0")

    def density(self, target: str) -> float:
        return self.electron_density if target == "electron" else self.neutrino_density


OUTER_SPACE = Environment("OUTER_SPACE", electron_density=1e-6)
ATMOSPHERE_CROSSING_TIME = 1e-4
ATMOSPHERE = Environment("ATMOSPHERE", electron_density=2e20, traversal_time=ATMOSPHERE_CROSSING_TIME)
ENVIRONMENTS = {"OUTER_SPACE": OUTER_SPACE, "ATMOSPHERE": ATMOSPHERE}


def decoherence_rate(env: Environment, E: float, xs: CrossSectionSet = DEFAULT_CROSS_SECTIONS,
                     constants: PhysicalConstants = CONSTANTS) -> float:
    """Decoherence rate in 1/s, summed over ``env.channels``."""
    if not E > 0:
        raise ValueError("energy must be positive")
    return sum(env.density(target) * constants.c * cross_section(ch, E, xs)
               for ch, target in env.channels)


def decoherence_damping(path: Iterable[tuple[Environment, float]], E: float,
                        xs: CrossSectionSet = DEFAULT_CROSS_SECTIONS,
                        constants: PhysicalConstants = CONSTANTS) -> float:
    """Accumulated damping exponent over ``(environment, duration)`` segments."""
    total = 0.0
    for env, duration in path:
        if duration < 0:
            raise ValueError("segment durations must be >= 0")
        total += decoherence_rate(env, E, xs, constants) * duration
    return total


def flight_path(t: float, atmosphere_time: float = ATMOSPHERE_CROSSING_TIME
                ) -> Sequence[tuple[Environment, float]]:
    """Vacuum flight followed by one crossing of the atmosphere, total time ``t``."""
    t_atm = min(atmosphere_time, t)
    return [(OUTER_SPACE, t - t_atm), (ATMOSPHERE, t_atm)]
