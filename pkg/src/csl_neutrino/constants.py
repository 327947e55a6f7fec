"""Physical constants and the small unit system used throughout the package.

Canonical internal units
------------------------
energy, mass (as rest energy mc^2)   eV
time                                 s
length                               cm
rate                                 1/s
cross section                        cm^2
number density                       cm^-3

Newton's constant and the Fermi constant are kept in their conventional
units (SI and GeV^-2) and converted where they are used.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

__all__ = [
    "PhysicalConstants",
    "CONSTANTS",
    "Dimension",
    "DimensionError",
    "Quantity",
    "convert",
    "light_travel_time",
    "UNITS",
]


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA constants in the units the rest of the package expects.

    Attributes
    ----------
    hbar : float
        Reduced Planck constant, eV s.
    c : float
        Speed of light, cm/s.
    G : float
        Newton's constant, m^3 kg^-1 s^-2.
    G_F : float
        Fermi constant G_F/(hbar c)^3, GeV^-2.
    m0c2 : float
        Reference (nucleon) rest energy, eV.
    e : float
        Elementary charge, J/eV.
    """

    hbar: float = 6.582119569e-16
    c: float = 2.99792458e10
    G: float = 6.67430e-11
    G_F: float = 1.1663787e-5
    m0c2: float = 938.272e6
    e: float = 1.602176634e-19

    def __post_init__(self):
        if not (self.hbar > 0 and self.c > 0):
            raise ValueError("hbar and c must be positive")
        if self.m0c2 <= 0:
            raise ValueError("m0c2 must be positive")

    @property
    def hbar_c(self) -> float:
        """hbar*c in eV cm."""
        return self.hbar * self.c


CONSTANTS = PhysicalConstants()


class Dimension(str, Enum):
    ENERGY = "energy"
    TIME = "time"
    LENGTH = "length"
    RATE = "rate"
    CROSS_SECTION = "cross-section"
    DENSITY = "density"
    DIMENSIONLESS = "dimensionless"


class DimensionError(ValueError):
    """Raised when quantities of different dimensions are combined."""


_JULIAN_YEAR_S = 365.25 * 86400.0
_LIGHT_YEAR_CM = CONSTANTS.c * _JULIAN_YEAR_S

# unit name -> (dimension, size of one unit in the canonical unit)
UNITS: dict[str, tuple[Dimension, float]] = {
    "eV": (Dimension.ENERGY, 1.0),
    "keV": (Dimension.ENERGY, 1e3),
    "MeV": (Dimension.ENERGY, 1e6),
    "GeV": (Dimension.ENERGY, 1e9),
    "TeV": (Dimension.ENERGY, 1e12),
    "J": (Dimension.ENERGY, 1.0 / CONSTANTS.e),
    "s": (Dimension.TIME, 1.0),
    "ms": (Dimension.TIME, 1e-3),
    "yr": (Dimension.TIME, _JULIAN_YEAR_S),
    "cm": (Dimension.LENGTH, 1.0),
    "m": (Dimension.LENGTH, 100.0),
    "km": (Dimension.LENGTH, 1e5),
    "fm": (Dimension.LENGTH, 1e-13),
    "ly": (Dimension.LENGTH, _LIGHT_YEAR_CM),
    "1/s": (Dimension.RATE, 1.0),
    "Hz": (Dimension.RATE, 1.0),
    "cm2": (Dimension.CROSS_SECTION, 1.0),
    "m2": (Dimension.CROSS_SECTION, 1e4),
    "cm-3": (Dimension.DENSITY, 1.0),
    "m-3": (Dimension.DENSITY, 1e-6),
    "1": (Dimension.DIMENSIONLESS, 1.0),
}


def _lookup(unit: str) -> tuple[Dimension, float]:
    try:
        return UNITS[unit]
    except KeyError:
        raise ValueError(f"unknown unit {unit!r}; known units: {sorted(UNITS)}") from None


@dataclass(frozen=True)
class Quantity:
    """A real value tagged with one of the units in :data:`UNITS`."""

    value: float
    unit: str

    def __post_init__(self):
        _lookup(self.unit)

    @property
    def dimension(self) -> Dimension:
        return UNITS[self.unit][0]

    def to(self, unit: str) -> "Quantity":
        return convert(self, unit)

    def _check(self, other) -> "Quantity":
        if not isinstance(other, Quantity):
            raise TypeError(f"cannot combine Quantity with {type(other).__name__}")
        if other.dimension is not self.dimension:
            raise DimensionError(
                f"dimension mismatch: {self.dimension.value} [{self.unit}] "
                f"vs {other.dimension.value} [{other.unit}]"
            )
        return other.to(self.unit)

    def __add__(self, other):
        return Quantity(self.value + self._check(other).value, self.unit)

    def __sub__(self, other):
        return Quantity(self.value - self._check(other).value, self.unit)

    def __neg__(self):
        return Quantity(-self.value, self.unit)

    def __mul__(self, k):
        if isinstance(k, Quantity):
            raise DimensionError("products of dimensioned quantities are not supported")
        return Quantity(self.value * k, self.unit)

    __rmul__ = __mul__

    def __truediv__(self, k):
        if isinstance(k, Quantity):
            other = self._check(k)
            return Quantity(self.value / other.value, "1")
        return Quantity(self.value / k, self.unit)

    def __lt__(self, other):
        return self.value < self._check(other).value

    def __le__(self, other):
        return self.value <= self._check(other).value

    def __float__(self):
        return float(self.value)


def convert(q: Quantity, target_unit: str) -> Quantity:
    """Rescale ``q`` into ``target_unit`` (same dimension only)."""
    dim, size = _lookup(q.unit)
    target_dim, target_size = _lookup(target_unit)
    if dim is not target_dim:
        raise DimensionError(
            f"cannot convert {dim.value} [{q.unit}] to {target_dim.value} [{target_unit}]"
        )
    if size == target_size:
        return Quantity(q.value, target_unit)
    return Quantity(q.value * (size / target_size), target_unit)


def light_travel_time(distance: Quantity, constants: PhysicalConstants = CONSTANTS) -> Quantity:
    """Flight time in seconds for a path traversed at the speed of light."""
    length_cm = convert(distance, "cm").value
    return Quantity(length_cm / constants.c, "s")


def ev_to_kg(mass_c2: float, constants: PhysicalConstants = CONSTANTS) -> float:
    """Convert a rest energy in eV to a mass in kg."""
    c_si = constants.c * 1e-2
    return mass_c2 * constants.e / (c_si * c_si)


def is_close_decade(value: float, target: float) -> bool:
    """True when ``value`` lies within one decade of ``target``."""
    return abs(math.log10(value) - math.log10(target)) <= 1.0
