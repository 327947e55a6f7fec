"""Diosi-Penrose (gravity-induced collapse) damping of neutrino oscillations.

The closed form evaluated here is::

    Lambda_G = 8 pi G/(hbar c) [ 3 (m_j + m_k) hbar^2 / (5 G_F)
               - m_j m_k E / (2 pi hbar c) ln(6 (m_j + m_k) pi hbar^3 c / (5 m_j m_k G_F E)) ] L

All quantities are converted to SI before they are combined. The Fermi
constant enters in energy-length form, ``G_F = (G_F/(hbar c)^3) (hbar c)^3``
in J m^3, which makes every term of the bracket kg^2/m and the log
argument dimensionless.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

from .constants import CONSTANTS, PhysicalConstants, ev_to_kg

__all__ = [
    "CUTOFF_PRESETS",
    "CutoffPreset",
    "DpParams",
    "DpResult",
    "UntrustedCutoffWarning",
    "fermi_constant_si",
    "lambda_g",
]


class UntrustedCutoffWarning(UserWarning):
    pass


@dataclass(frozen=True)
class CutoffPreset:
    name: str
    radius_m: float
    trusted: bool
    note: str


CUTOFF_PRESETS = {
    "WEAK_SCALE": CutoffPreset(
        "WEAK_SCALE", 1e-31, False,
        "R ~ G_F m / hbar^2; far below any physical scale, result not trustworthy",
    ),
    "NUCLEAR": CutoffPreset("NUCLEAR", 1e-15, True, "nuclear size"),
    "GRW_SCALE": CutoffPreset("GRW_SCALE", 1e-7, True, "R ~ 1e-5 cm"),
}


@dataclass(frozen=True)
class DpParams:
    """Inputs of the gravity-collapse damping estimate.

    Masses and energy are in eV (rest energies), ``distance`` in metres.
    ``xi_bar`` is the gravitational coupling (default -G, so the damping
    carries +G). The closed form already embeds the point-like cutoff
    ``R ~ G_F m / hbar^2``; ``cutoff`` only records which radius the caller
    has in mind and triggers a warning for the untrusted preset.
    """

    mass_j_c2: float
    mass_k_c2: float
    energy: float = 1e19
    distance: float = 1e25
    cutoff: str = "WEAK_SCALE"
    xi_bar: Optional[float] = None

    def __post_init__(self):
        if self.cutoff not in CUTOFF_PRESETS:
            raise ValueError(f"unknown cutoff preset {self.cutoff!r}")
        if self.distance < 0:
            raise ValueError("distance must be >= 0")

    @property
    def cutoff_radius(self) -> float:
        return CUTOFF_PRESETS[self.cutoff].radius_m


@dataclass(frozen=True)
class DpResult:
    """Lambda_G and its two bracket contributions (each already times 8 pi G L / hbar c)."""

    value: float
    first_term: float
    second_term: float
    log_argument: float
    cutoff: str


def fermi_constant_si(constants: PhysicalConstants = CONSTANTS) -> float:
    """G_F in J m^3."""
    hbar_c_si = constants.hbar * constants.e * constants.c * 1e-2  # J m
    GeV = 1e9 * constants.e
    return constants.G_F / GeV ** 2 * hbar_c_si ** 3


def lambda_g(params: DpParams, constants: PhysicalConstants = CONSTANTS) -> DpResult:
    """Dimensionless damping exponent of the Diosi-Penrose model."""
    if not (params.mass_j_c2 > 0 and params.mass_k_c2 > 0):
        raise ValueError("neutrino masses must be positive (log argument)")
    if not params.energy > 0:
        raise ValueError("energy must be positive (log argument)")
    preset = CUTOFF_PRESETS[params.cutoff]
    if not preset.trusted:
        warnings.warn(f"cutoff {preset.name}: {preset.note}", UntrustedCutoffWarning, stacklevel=2)

    G = constants.G if params.xi_bar is None else -params.xi_bar
    c = constants.c * 1e-2
    hbar = constants.hbar * constants.e
    GF = fermi_constant_si(constants)
    mj = ev_to_kg(params.mass_j_c2, constants)
    mk = ev_to_kg(params.mass_k_c2, constants)
    E = params.energy * constants.e

    first = 3.0 * (mj + mk) * hbar ** 2 / (5.0 * GF)
    log_arg = 6.0 * (mj + mk) * math.pi * hbar ** 3 * c / (5.0 * mj * mk * GF * E)
    second = mj * mk * E / (2.0 * math.pi * hbar * c) * math.log(log_arg)
    coef = 8.0 * math.pi * G / (hbar * c)
    L = params.distance
    return DpResult(
        value=coef * (first - second) * L,
        first_term=coef * first * L,
        second_term=coef * second * L,
        log_argument=log_arg,
        cutoff=preset.name,
    )
