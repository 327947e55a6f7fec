"""Neutrino mass/mixing model, propagation scenarios and kinematics."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from itertools import combinations
from typing import Optional, Sequence

import numpy as np

from .constants import CONSTANTS, PhysicalConstants

__all__ = [
    "DEFAULT_DM2",
    "DegenerateMassWarning",
    "NeutrinoModel",
    "Scenario",
    "energy",
    "energies",
    "energy_gap",
    "mixing_from_angles",
    "ur_expansion_error_rate",
]

#: Largest squared mass difference used for the CSL estimates, eV^2.
DEFAULT_DM2 = 7.59e-5

UNITARITY_TOL = 1e-12


class DegenerateMassWarning(UserWarning):
    """Two or more mass eigenvalues coincide; their CSL damping vanishes."""


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def mixing_from_angles(angles: Sequence[float], n: Optional[int] = None) -> np.ndarray:
    """Real orthogonal mixing matrix from n(n-1)/2 rotation angles.

    Angles are ordered by plane (0,1), (0,2), ..., (1,2), ... and the
    rotations are applied so that for three flavors the result is the
    familiar ``R23 @ R13 @ R12`` without CP phase.
    """
    angles = list(angles)
    if n is None:
        n = int(round((1 + math.sqrt(1 + 8 * len(angles))) / 2))
    planes = list(combinations(range(n), 2))
    if len(planes) != len(angles):
        raise ValueError(f"{n} flavors need {len(planes)} mixing angles, got {len(angles)}")
    U = np.eye(n)
    for (i, j), theta in zip(planes, angles):
        R = np.eye(n)
        c, s = math.cos(theta), math.sin(theta)
        R[i, i] = R[j, j] = c
        R[i, j] = s
        R[j, i] = -s
        U = R @ U
    return U


@dataclass(frozen=True)
class NeutrinoModel:
    """n mass eigenstates with a real mixing matrix.

    Parameters
    ----------
    masses_c2 : array_like
        Rest energies m_j c^2 in eV. They are sorted ascending; the mixing
        columns and widths are permuted along with them.
    mixing : array_like
        Real n x n matrix U with ``|nu_alpha> = sum_j U[alpha, j] |nu_j>``.
    widths : array_like, optional
        Decay widths Gamma_j in eV (default zero).
    """

    masses_c2: np.ndarray
    mixing: np.ndarray
    widths: np.ndarray = None
    degenerate: bool = field(init=False)

    def __post_init__(self):
        masses = np.asarray(self.masses_c2, dtype=float).ravel()
        mixing = np.asarray(self.mixing)
        if np.iscomplexobj(mixing):
            if np.any(mixing.imag != 0):
                raise ValueError("complex (CP-violating) mixing matrices are not supported")
            mixing = mixing.real
        mixing = mixing.astype(float)
        n = masses.size
        if n < 1:
            raise ValueError("at least one mass eigenstate is required")
        if mixing.shape != (n, n):
            raise ValueError(f"mixing must be {n}x{n}, got shape {mixing.shape}")
        if not np.all(np.isfinite(masses)) or np.any(masses < 0):
            raise ValueError("masses_c2 must be finite and non-negative")
        dev = np.max(np.abs(mixing.T @ mixing - np.eye(n)))
        if dev > UNITARITY_TOL:
            raise ValueError(f"mixing matrix is not orthogonal (max |U^T U - I| = {dev:.3e})")
        widths = np.zeros(n) if self.widths is None else np.asarray(self.widths, dtype=float).ravel()
        if widths.shape != (n,):
            raise ValueError(f"expected {n} widths, got {widths.size}")
        if np.any(widths < 0) or not np.all(np.isfinite(widths)):
            raise ValueError("decay widths must be finite and >= 0")

        order = np.argsort(masses, kind="stable")
        masses, mixing, widths = masses[order], mixing[:, order], widths[order]
        degenerate = bool(np.any(np.diff(masses) == 0))
        if degenerate:
            warnings.warn(
                "degenerate mass eigenvalues: CSL damping between them is zero",
                DegenerateMassWarning,
                stacklevel=3,
            )
        object.__setattr__(self, "masses_c2", _readonly(masses))
        object.__setattr__(self, "mixing", _readonly(mixing))
        object.__setattr__(self, "widths", _readonly(widths))
        object.__setattr__(self, "degenerate", degenerate)

    @property
    def n(self) -> int:
        return self.masses_c2.size

    @property
    def has_widths(self) -> bool:
        return bool(np.any(self.widths > 0))

    @classmethod
    def from_splittings(cls, dm2: Sequence[float], lightest: float = 0.0,
                        mixing=None, angles=None, widths=None) -> "NeutrinoModel":
        """Build from the lightest mass and the splittings m_k^2 - m_1^2 (eV^2)."""
        dm2 = [float(d) for d in dm2]
        if any(d < 0 for d in dm2):
            raise ValueError("mass splittings must be >= 0 relative to the lightest state")
        if lightest < 0:
            raise ValueError("lightest mass must be >= 0")
        masses = [lightest] + [math.sqrt(lightest * lightest + d) for d in dm2]
        n = len(masses)
        if mixing is None:
            mixing = mixing_from_angles(angles, n) if angles is not None else np.eye(n)
        return cls(masses, mixing, widths)

    @classmethod
    def two_flavor(cls, theta: float, dm2: float = DEFAULT_DM2, lightest: float = 0.0,
                   widths=None) -> "NeutrinoModel":
        """U = [[cos t, sin t], [-sin t, cos t]] with masses (m, sqrt(m^2 + dm2))."""
        c, s = math.cos(theta), math.sin(theta)
        return cls.from_splittings([dm2], lightest, mixing=[[c, s], [-s, c]], widths=widths)

    def check_index(self, *idx: int):
        for i in idx:
            if not (0 <= i < self.n):
                raise IndexError(f"mass index {i} out of range for {self.n} eigenstates")


@dataclass(frozen=True)
class Scenario:
    """Initial momentum (or energy) and flight time (or baseline).

    ``energy`` is the ultra-relativistic label E used in the literature;
    giving it sets the common momentum to p_i c = E. A ``baseline`` in cm
    is converted to a flight time assuming v = c.
    """

    momentum_c: Optional[float] = None
    energy: Optional[float] = None
    flight_time: Optional[float] = None
    baseline: Optional[float] = None
    initial_flavor: int = 0

    def __post_init__(self):
        if (self.momentum_c is None) == (self.energy is None):
            raise ValueError("set exactly one of momentum_c or energy")
        if (self.flight_time is None) == (self.baseline is None):
            raise ValueError("set exactly one of flight_time or baseline")
        p = self.momentum_c if self.momentum_c is not None else self.energy
        if not (p > 0 and math.isfinite(p)):
            raise ValueError("momentum/energy must be positive and finite")
        dist = self.flight_time if self.flight_time is not None else self.baseline
        # t = 0 is allowed so that the trivial no-evolution limit can be evaluated
        if not (dist >= 0 and math.isfinite(dist)):
            raise ValueError("flight time/baseline must be non-negative and finite")
        if self.initial_flavor < 0:
            raise ValueError("initial_flavor must be >= 0")

    @property
    def ultra_relativistic(self) -> bool:
        return self.energy is not None

    @property
    def p_c(self) -> float:
        """Common momentum p_i c of all mass eigenstates, eV."""
        return self.momentum_c if self.momentum_c is not None else self.energy

    def time(self, constants: PhysicalConstants = CONSTANTS) -> float:
        if self.flight_time is not None:
            return self.flight_time
        return self.baseline / constants.c

    def with_time(self, t: float) -> "Scenario":
        return Scenario(self.momentum_c, self.energy, t, None, self.initial_flavor)

    def with_energy(self, E: float) -> "Scenario":
        return Scenario(None, E, self.flight_time, self.baseline, self.initial_flavor)


def energy(momentum_c: float, mass_c2: float) -> float:
    """Exact dispersion relation sqrt((pc)^2 + (mc^2)^2), eV."""
    if momentum_c < 0 or mass_c2 < 0:
        raise ValueError("momentum and mass must be non-negative")
    return math.hypot(momentum_c, mass_c2)


def energies(scenario: Scenario, model: NeutrinoModel) -> np.ndarray:
    p = scenario.p_c
    return np.array([energy(p, m) for m in model.masses_c2])


def _gap(p: float, m_j: float, m_k: float) -> float:
    # E_k - E_j = (m_k^2 - m_j^2) / (E_k + E_j); same value as the difference
    # of square roots without the cancellation at p >> m.
    return (m_k - m_j) * (m_k + m_j) / (energy(p, m_k) + energy(p, m_j))


def energy_gap(scenario: Scenario, model: NeutrinoModel, j: int, k: int) -> float:
    """E_i^(k) - E_i^(j) at the scenario's common momentum, eV."""
    model.check_index(j, k)
    if j == k:
        return 0.0
    m = model.masses_c2
    return _gap(scenario.p_c, m[j], m[k])


def ur_expansion_error_rate(E: float, m_j_c2: float, m_k_c2: float,
                            constants: PhysicalConstants = CONSTANTS) -> float:
    """Second-order term of the ultra-relativistic gap expansion over hbar, 1/s.

    ``dm2 * (m_k^2 + m_j^2) / (8 E^3 hbar)`` with ``dm2 = m_k^2 - m_j^2``;
    multiplied by a flight time it is the phase error of the usual
    ``dm2 / 2E`` oscillation frequency.
    """
    if not E > 0:
        raise ValueError("energy must be positive")
    dm2 = (m_k_c2 - m_j_c2) * (m_k_c2 + m_j_c2)
    return dm2 * (m_k_c2 ** 2 + m_j_c2 ** 2) / (8.0 * E ** 3 * constants.hbar)
