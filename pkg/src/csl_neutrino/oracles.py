"""Quadrature checks of the momentum-integral approximations behind xi_jk.

Everything is evaluated in dimensionless variables: ``s`` (momentum offset
in units of hbar/r_C), ``y = r_C p_i / hbar``, ``a = (r_C m c / hbar)^2`` and
``tau = c t / r_C``. Raw physical magnitudes (tau ~ 1e33) would be
meaningless to a quadrature routine.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .constants import CONSTANTS, PhysicalConstants
from .damping import CollapseParams, xi_rate

__all__ = [
    "AppendixBResult",
    "AppendixCResult",
    "DimensionalEstimates",
    "DimensionlessRegime",
    "QuadratureError",
    "SQRT_PI",
    "TAYLOR_THRESHOLD",
    "appendix_b_check",
    "appendix_c_check",
    "dimensional_estimates",
    "g_of_s",
    "phase_bracket",
]

SQRT_PI = math.sqrt(math.pi)
DEFAULT_RTOL = 1e-9
DEFAULT_LIMIT = 200
#: below this value of tau*(a_j - a_k)/y^2 the first-order g is used
TAYLOR_THRESHOLD = 1e-3
_SERIES_CUTOFF = 1e-4


class QuadratureError(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


@dataclass(frozen=True)
class DimensionlessRegime:
    y: float
    a_j: float
    a_k: float = 0.0
    tau: float = 0.0

    def __post_init__(self):
        if not self.y > 0:
            raise ValueError("y must be > 0")
        if self.a_j < 0 or self.a_k < 0:
            raise ValueError("a_j, a_k must be >= 0")
        if self.tau < 0:
            raise ValueError("tau must be >= 0")

    @classmethod
    def from_physical(cls, momentum_c: float, m_j_c2: float, m_k_c2: float = 0.0,
                      t: float = 0.0, r_C: float = 1e-5,
                      constants: PhysicalConstants = CONSTANTS) -> "DimensionlessRegime":
        """y = r_C p c/(hbar c), a = (r_C m c^2/(hbar c))^2, tau = c t / r_C."""
        scale = r_C / constants.hbar_c  # eV^-1
        return cls(y=scale * momentum_c, a_j=(scale * m_j_c2) ** 2,
                   a_k=(scale * m_k_c2) ** 2, tau=constants.c * t / r_C)

    @property
    def delta_a(self) -> float:
        return self.a_j - self.a_k

    @property
    def smallness(self) -> float:
        """tau * (a_j - a_k) / y^2, the size of g over the Gaussian window."""
        return self.tau * abs(self.delta_a) / self.y ** 2

    @property
    def condition_satisfied(self) -> bool:
        return self.y >= 10.0 * math.sqrt(self.tau * max(self.delta_a, 0.0))


def _quad(f, rtol, limit, epsabs=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        val, err, info, *rest = integrate.quad(f, -np.inf, np.inf, epsabs=epsabs, epsrel=rtol,
                                               limit=limit, full_output=1)
    if rest:  # ier != 0
        raise QuadratureError(f"quadrature did not converge: {rest[0]} (estimate {val:.6g} +- {err:.2g})")
    return val, err


@dataclass(frozen=True)
class AppendixBResult:
    numeric: float
    closed_form: float
    relative_error: float
    abserr: float


def _deficit(u: float, a: float) -> float:
    # 1 - u / sqrt(u^2 + a), without cancellation for u >> sqrt(a)
    R = math.sqrt(u * u + a)
    if u >= 0:
        return a / (R * (R + u)) if R > 0 else 0.0
    return 1.0 - u / R


def appendix_b_check(regime: DimensionlessRegime, rtol: float = DEFAULT_RTOL,
                     limit: int = DEFAULT_LIMIT) -> AppendixBResult:
    """Compare int ds (s+y)/sqrt((s+y)^2 + a_j) exp(-s^2) with sqrt(pi).

    The integral is written as ``sqrt(pi) - int ds deficit(s) exp(-s^2)`` and
    only the deficit is integrated numerically, so the relative error is
    resolved even when it is far below the quadrature tolerance.
    """
    y, a = regime.y, regime.a_j
    deficit, err = _quad(lambda s: _deficit(s + y, a) * math.exp(-s * s), rtol, limit)
    return AppendixBResult(SQRT_PI - deficit, SQRT_PI, deficit / SQRT_PI, err)


def _g_exact(s: float, y: float, a_j: float, a_k: float, tau: float) -> float:
    # g = tau (sqrt(u^2+a_k) - sqrt(u^2+a_j) - sqrt(y^2+a_k) + sqrt(y^2+a_j)), u = s + y,
    # rearranged so that no nearly equal square roots are subtracted.
    if a_j == a_k or s == 0.0 or tau == 0.0:
        return 0.0
    u = s + y
    Rj_u, Rk_u = math.sqrt(u * u + a_j), math.sqrt(u * u + a_k)
    Rj_y, Rk_y = math.sqrt(y * y + a_j), math.sqrt(y * y + a_k)
    inner = 1.0 / (Rk_y + Rk_u) + 1.0 / (Rj_y + Rj_u)
    return tau * (a_j - a_k) * s * (2.0 * y + s) * inner / ((Rk_u + Rj_u) * (Rk_y + Rj_y))


def _g_taylor(s: float, y: float, a_j: float, a_k: float, tau: float) -> float:
    return tau * (a_j - a_k) * s / (2.0 * (s + y) * y)


def g_of_s(regime: DimensionlessRegime, s: float, form: str = "exact") -> float:
    """Phase mismatch g(s) of the first-order interference integrand.

    ``form`` is ``"exact"``, ``"taylor"`` (first order in a/y^2) or ``"auto"``
    (taylor when ``regime.smallness < TAYLOR_THRESHOLD``).
    """
    if form == "auto":
        form = "taylor" if regime.smallness < TAYLOR_THRESHOLD else "exact"
    if form == "exact":
        fn = _g_exact
    elif form == "taylor":
        fn = _g_taylor
    else:
        raise ValueError(f"unknown form {form!r}")
    return fn(s, regime.y, regime.a_j, regime.a_k, regime.tau)


def phase_bracket(g: float) -> complex:
    """(exp(i g) - 1) / (i g), with its limit 1 at g = 0."""
    if abs(g) < _SERIES_CUTOFF:
        g2 = g * g
        return complex(1.0 - g2 / 6.0 + g2 * g2 / 120.0,
                       g / 2.0 - g * g2 / 24.0 + g * g2 * g2 / 720.0)
    return complex(math.sin(g) / g, (1.0 - math.cos(g)) / g)


@dataclass(frozen=True)
class AppendixCResult:
    ratio: complex
    deviation: float
    condition_satisfied: bool
    g_form: str
    abserr: float


def appendix_c_check(regime: DimensionlessRegime, rtol: float = DEFAULT_RTOL,
                     limit: int = DEFAULT_LIMIT, form: str = "auto") -> AppendixCResult:
    """Ratio of the oscillatory momentum integral to its g = 0 value sqrt(pi).

    ``ratio = (1/sqrt(pi)) int ds (s/y + 1) [(e^{ig}-1)/(ig)] e^{-s^2}``.
    """
    if regime.delta_a < 0:
        raise ValueError("appendix_c_check expects a_j >= a_k")
    if form == "auto":
        form = "taylor" if regime.smallness < TAYLOR_THRESHOLD else "exact"
    y = regime.y

    def weight(s):
        return (s / y + 1.0) * math.exp(-s * s)

    def re(s):
        return weight(s) * phase_bracket(g_of_s(regime, s, form)).real

    def im(s):
        return weight(s) * phase_bracket(g_of_s(regime, s, form)).imag

    eps = 1e-12 * SQRT_PI
    re_val, re_err = _quad(re, rtol, limit, epsabs=eps)
    im_val, im_err = _quad(im, rtol, limit, epsabs=eps)
    ratio = complex(re_val, im_val) / SQRT_PI
    return AppendixCResult(ratio, abs(ratio - 1.0), regime.condition_satisfied, form,
                           math.hypot(re_err, im_err) / SQRT_PI)


@dataclass(frozen=True)
class DimensionalEstimates:
    xi1_t: float
    xi2_t: float
    xi_exact_t: float

    def orders_apart(self) -> tuple[float, float]:
        """log10 distance of each naive estimate from the exact exponent."""
        ref = math.log10(self.xi_exact_t)
        return (abs(math.log10(self.xi1_t) - ref), abs(math.log10(self.xi2_t) - ref))


def dimensional_estimates(params: CollapseParams, m_j_c2: float, m_k_c2: float,
                          E: float, t: float) -> DimensionalEstimates:
    """Naive dimensional guesses for xi*t next to the exact value.

    The guesses are ``gamma/(r_C^3 m0^2) (m_j - m_k)^2`` and
    ``gamma/(r_C^3 m0^2) |m_j^2 - m_k^2|`` with unit prefactor; only their
    order of magnitude means anything.
    """
    if m_j_c2 < 0 or m_k_c2 < 0:
        raise ValueError("masses must be >= 0")
    base = params.gamma / params.r_C ** 3 * t
    xi1 = base * ((m_j_c2 - m_k_c2) / params.m0c2) ** 2
    xi2 = base * abs((m_j_c2 - m_k_c2) * (m_j_c2 + m_k_c2)) / params.m0c2 ** 2
    return DimensionalEstimates(xi1, xi2, xi_rate(params, E, m_j_c2, m_k_c2) * t)
