"""CSL damping of neutrino flavor oscillations.

The interference term between mass eigenstates j and k is suppressed by
a rate::

    xi_jk = gamma / (16 pi^{3/2} r_C^3 m0^2 c^4) * (m_j^2 c^4 / E_j - m_k^2 c^4 / E_k)^2

either perturbatively, ``1 - xi t``, or in resummed form ``exp(-xi t)``.
Energies are always the exact dispersion energies at the common momentum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from .constants import CONSTANTS, PhysicalConstants
from .model import DEFAULT_DM2, NeutrinoModel, Scenario, _gap, energy

__all__ = [
    "ADLER",
    "GRW",
    "PRESETS",
    "CollapseParams",
    "DampingMode",
    "OscillationResult",
    "PerturbativeBoundError",
    "TABLE1_SCENARIOS",
    "Table1Row",
    "oscillate",
    "table1",
    "transition_probability",
    "transition_probability_decaying",
    "ur_prefactor",
    "xi",
    "xi_matrix",
    "xi_rate",
]


@dataclass(frozen=True)
class CollapseParams:
    """Mass-proportional CSL parameters.

    gamma in cm^3/s, r_C in cm, m0c2 (reference nucleon rest energy) in eV.
    """

    gamma: float = 1e-22
    r_C: float = 1e-5
    m0c2: float = CONSTANTS.m0c2

    def __post_init__(self):
        if not self.gamma >= 0:
            raise ValueError("gamma must be >= 0")
        if not self.r_C > 0:
            raise ValueError("r_C must be > 0")
        if not self.m0c2 > 0:
            raise ValueError("m0c2 must be > 0")

    @property
    def prefactor(self) -> float:
        """gamma / (16 pi^{3/2} r_C^3 m0^2 c^4), in s^-1 eV^-2."""
        return self.gamma / (16.0 * math.pi ** 1.5 * self.r_C ** 3 * self.m0c2 ** 2)

    def gamma_m(self, mass_c2: float) -> float:
        """Mass-scaled coupling gamma (m/m0)^2, cm^3/s."""
        return self.gamma * (mass_c2 / self.m0c2) ** 2

    def scaled(self, factor: float) -> "CollapseParams":
        return CollapseParams(self.gamma * factor, self.r_C, self.m0c2)


GRW = CollapseParams(gamma=1e-30, r_C=1e-5)
ADLER = CollapseParams(gamma=1e-22, r_C=1e-5)
PRESETS = {"GRW": GRW, "ADLER": ADLER}


class DampingMode(str, Enum):
    LINEAR = "LINEAR"
    EXPONENTIAL = "EXPONENTIAL"


class PerturbativeBoundError(ValueError):
    """LINEAR damping requested outside the perturbative range xi*t <= 1."""


def _mass_term_difference(p: float, m_j: float, m_k: float) -> float:
    # m_j^2/E_j - m_k^2/E_k rewritten as
    # (m_j^2 - m_k^2) (p^2 + E_j E_k) / ((E_j + E_k) E_j E_k):
    # no subtraction of nearly equal numbers, and symmetric up to sign.
    if m_j == m_k:
        return 0.0
    E_j, E_k = energy(p, m_j), energy(p, m_k)
    return (m_j - m_k) * (m_j + m_k) * ((p * p + E_j * E_k) / ((E_j + E_k) * E_j * E_k))


def xi_rate(params: CollapseParams, momentum_c: float, m_j_c2: float, m_k_c2: float) -> float:
    """CSL decay rate (1/s) for two eigenstates sharing momentum ``momentum_c``."""
    d = _mass_term_difference(momentum_c, m_j_c2, m_k_c2)
    return params.prefactor * d * d


def xi(params: CollapseParams, model: NeutrinoModel, scenario: Scenario, j: int, k: int) -> float:
    """Decay rate xi_jk of the (j, k) interference term, 1/s."""
    model.check_index(j, k)
    if j == k:
        return 0.0
    m = model.masses_c2
    return xi_rate(params, scenario.p_c, m[j], m[k])


def xi_matrix(params: CollapseParams, model: NeutrinoModel, scenario: Scenario) -> np.ndarray:
    n = model.n
    out = np.zeros((n, n))
    for j in range(n):
        for k in range(j + 1, n):
            out[j, k] = out[k, j] = xi(params, model, scenario, j, k)
    return out


def ur_prefactor(params: CollapseParams, dm2: float = DEFAULT_DM2) -> float:
    """Coefficient C of ``xi t = C t / E^2`` in the ultra-relativistic limit, s^-1 eV^2."""
    return params.prefactor * dm2 * dm2


def _eigenstate_phases(model: NeutrinoModel, scenario: Scenario, t: float,
                       constants: PhysicalConstants) -> np.ndarray:
    # phi_j = (E_j - E_0) t / hbar relative to the lightest state, from the
    # stable form of the gap.
    p = scenario.p_c
    m = model.masses_c2
    return np.array([_gap(p, m[0], mj) * t / constants.hbar for mj in m])


def _interference_matrix(phi: np.ndarray) -> np.ndarray:
    # cos(phi_k - phi_j) as c c^T + s s^T. Pairwise phases computed one by one
    # are not mutually consistent once they reach ~1e16 rad, and the resulting
    # matrix can lose positivity (negative probabilities); this form is
    # positive semidefinite by construction.
    c, s = np.cos(phi), np.sin(phi)
    C = np.outer(c, c) + np.outer(s, s)
    np.fill_diagonal(C, 1.0)
    return C


@dataclass(frozen=True)
class OscillationResult:
    """Flavor probabilities from one initial flavor, plus the damping data.

    ``damping_factors`` holds D_jk applied to each interference term and
    ``log_damping`` holds ln D_jk (``-xi t`` in EXPONENTIAL mode), which
    stays representable when ``1 - D`` underflows. ``phases[j, k]`` is the
    relative phase (E_k - E_j) t / hbar and ``cos_phases`` its cosine as
    used in the probabilities.
    """

    probabilities: np.ndarray
    xi_matrix: np.ndarray
    xi_t: np.ndarray
    damping_factors: np.ndarray
    log_damping: np.ndarray
    phases: np.ndarray
    cos_phases: np.ndarray
    mode: DampingMode
    survival_weights: Optional[np.ndarray]
    initial_flavor: int
    time: float

    @property
    def total(self) -> float:
        return float(self.probabilities.sum())


def _damping(xi_t: np.ndarray, mode: DampingMode):
    if mode is DampingMode.EXPONENTIAL:
        return np.exp(-xi_t), -xi_t
    worst = float(xi_t.max(initial=0.0))
    if worst > 1.0:
        raise PerturbativeBoundError(
            f"LINEAR damping needs xi*t <= 1 (perturbative bound); got xi*t = {worst:.6g}"
        )
    return 1.0 - xi_t, np.log1p(-xi_t)


def oscillate(params: CollapseParams, model: NeutrinoModel, scenario: Scenario,
              mode: DampingMode = DampingMode.EXPONENTIAL, *, decaying: Optional[bool] = None,
              constants: PhysicalConstants = CONSTANTS) -> OscillationResult:
    """Transition probabilities P(alpha -> beta) for every final flavor beta.

    ``P_beta = w^T M w`` with ``w_j = U[alpha, j] U[beta, j]`` and
    ``M_jk = D_jk cos(phase_jk)`` (``M_jj = 1``). With ``decaying`` (default:
    whenever the model carries nonzero widths) the diagonal is weighted by
    ``exp(-Gamma_k t / hbar)`` and the interference terms by
    ``exp(-(Gamma_j + Gamma_k) t / 2 hbar)``.
    """
    mode = DampingMode(mode)
    alpha = scenario.initial_flavor
    if not 0 <= alpha < model.n:
        raise IndexError(f"initial flavor {alpha} out of range for {model.n} flavors")
    t = scenario.time(constants)
    xim = xi_matrix(params, model, scenario)
    xi_t = xim * t
    D, lnD = _damping(xi_t, mode)
    phi = _eigenstate_phases(model, scenario, t, constants)
    C = _interference_matrix(phi)
    M = D * C
    np.fill_diagonal(M, 1.0)

    if decaying is None:
        decaying = model.has_widths
    survival = None
    if decaying:
        decay_rates = model.widths / constants.hbar
        survival = np.exp(-decay_rates * t)
        pair = np.exp(-0.5 * (decay_rates[:, None] + decay_rates[None, :]) * t)
        M = M * pair
        np.fill_diagonal(M, survival)

    U = model.mixing
    W = U[alpha, :][None, :] * U  # W[beta, j] = U[alpha, j] U[beta, j]
    probs = np.einsum("bj,jk,bk->b", W, M, W)
    return OscillationResult(
        probabilities=probs,
        xi_matrix=xim,
        xi_t=xi_t,
        damping_factors=D,
        log_damping=lnD,
        phases=phi[None, :] - phi[:, None],
        cos_phases=C,
        mode=mode,
        survival_weights=survival,
        initial_flavor=alpha,
        time=t,
    )


def transition_probability(params: CollapseParams, model: NeutrinoModel, scenario: Scenario,
                           beta: int, mode: DampingMode = DampingMode.EXPONENTIAL,
                           constants: PhysicalConstants = CONSTANTS) -> float:
    """P(alpha -> beta) for stable neutrinos (widths ignored)."""
    model.check_index(beta)
    res = oscillate(params, model, scenario, mode, decaying=False, constants=constants)
    return float(res.probabilities[beta])


def transition_probability_decaying(params: CollapseParams, model: NeutrinoModel,
                                    scenario: Scenario, beta: int,
                                    mode: DampingMode = DampingMode.EXPONENTIAL,
                                    constants: PhysicalConstants = CONSTANTS) -> float:
    """P(alpha -> beta) including the decay widths of the mass eigenstates."""
    model.check_index(beta)
    res = oscillate(params, model, scenario, mode, decaying=True, constants=constants)
    return float(res.probabilities[beta])


@dataclass(frozen=True)
class Table1Row:
    name: str
    energy: float
    time: float
    xi_t: float
    xi_t_ur: float


#: (name, E in eV, flight time in s)
TABLE1_SCENARIOS = (
    ("cosmogenic", 1e19, 3.15e18),
    ("solar", 1e6, 5e2),
    ("laboratory", 1e10, 2.13e-2),
)


def table1(params: CollapseParams = ADLER, model: Optional[NeutrinoModel] = None,
           dm2: float = DEFAULT_DM2) -> list[Table1Row]:
    """Damping exponent xi*t for the cosmogenic, solar and laboratory scenarios.

    ``xi_t`` uses the exact energies of ``model`` (default: lightest mass 0,
    splitting ``dm2``) for the first two eigenstates; ``xi_t_ur`` is the
    ultra-relativistic shortcut ``C t / E^2``.
    """
    if model is None:
        model = NeutrinoModel.from_splittings([dm2], 0.0)
    C = ur_prefactor(params, dm2)
    rows = []
    for name, E, t in TABLE1_SCENARIOS:
        sc = Scenario(energy=E, flight_time=t)
        rows.append(Table1Row(name, E, t, xi(params, model, sc, 0, 1) * t, C * t / E ** 2))
    return rows
