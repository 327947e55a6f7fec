"""Monte Carlo check of the CSL damping through per-eigenstate phase noise.

Each mass eigenstate j picks up a random phase ``sigma_j W_t`` from one
shared Wiener process W (the collapse noise field is common to all
eigenstates at the same place). The relative phase of the pair (j, k) is
then ``(omega_k - omega_j) t + (sigma_j - sigma_k) W_t`` and its ensemble
average decays as ``exp(-(sigma_j - sigma_k)^2 t / 2)``. With

    sigma_j = sqrt(gamma_{m_j} / (8 pi^{3/2} r_C^3)) m_j c^2 / E_j

that rate is exactly xi_jk. Physical rates (~1e-55 per flight) cannot be
simulated, so the Monte Carlo is run at synthetic rates of order 0.1/s;
the link to the physical numbers is the algebraic identity above, not the
simulation.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .constants import CONSTANTS, PhysicalConstants
from .damping import CollapseParams, _mass_term_difference
from .model import NeutrinoModel, Scenario, _gap, energy

__all__ = [
    "DecayFit",
    "InterferenceSeries",
    "McConfig",
    "PhaseNoiseModel",
    "fit_decay_rate",
    "simulate_interference",
]


@dataclass(frozen=True)
class PhaseNoiseModel:
    """Noise amplitudes sigma_j (s^-1/2) and angular frequencies omega_j (1/s).

    ``omega`` may carry an arbitrary common offset; only differences enter.
    ``sigma_gaps``, when given, holds sigma_j - sigma_k computed without
    cancellation; for nearly degenerate masses the plain subtraction of
    the stored amplitudes loses most of its significant digits.
    """

    sigma: tuple
    omega: tuple
    shared_noise: bool = True
    sigma_gaps: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        sigma = tuple(float(s) for s in self.sigma)
        omega = tuple(float(w) for w in self.omega)
        if len(sigma) != len(omega):
            raise ValueError("sigma and omega must have the same length")
        if any(s < 0 for s in sigma):
            raise ValueError("noise amplitudes must be >= 0")
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "omega", omega)
        if self.sigma_gaps is not None:
            gaps = np.array(self.sigma_gaps, dtype=float)
            if gaps.shape != (len(sigma), len(sigma)):
                raise ValueError("sigma_gaps must be an n x n matrix")
            gaps.setflags(write=False)
            object.__setattr__(self, "sigma_gaps", gaps)

    @classmethod
    def from_physics(cls, params: CollapseParams, model: NeutrinoModel, scenario: Scenario,
                     constants: PhysicalConstants = CONSTANTS) -> "PhaseNoiseModel":
        """Amplitudes matching xi_jk, frequencies relative to the lightest state."""
        p = scenario.p_c
        m = model.masses_c2
        norm = 8.0 * math.pi ** 1.5 * params.r_C ** 3
        sigma = [math.sqrt(params.gamma_m(mj) / norm) * mj / energy(p, mj) for mj in m]
        omega = [_gap(p, m[0], mj) / constants.hbar for mj in m]
        # sigma_j = sqrt(gamma / norm) / m0 * m_j^2 / E_j, so the gaps share
        # the stable form of m_j^2/E_j - m_k^2/E_k used for xi_jk.
        scale = math.sqrt(params.gamma / norm) / params.m0c2
        gaps = np.array([[scale * _mass_term_difference(p, mj, mk) for mk in m] for mj in m])
        return cls(tuple(sigma), tuple(omega), sigma_gaps=gaps)

    def sigma_gap(self, j: int, k: int) -> float:
        """sigma_j - sigma_k."""
        if self.sigma_gaps is not None:
            return float(self.sigma_gaps[j, k])
        return self.sigma[j] - self.sigma[k]

    def rate(self, j: int, k: int) -> float:
        """Decay rate (sigma_j - sigma_k)^2 / 2 of the (j, k) relative phase."""
        d = self.sigma_gap(j, k)
        return 0.5 * d * d

    @classmethod
    def synthetic(cls, rate: float, d_omega: float = 0.0) -> "PhaseNoiseModel":
        """Two-state model whose relative phase decays at ``rate``."""
        return cls((0.0, math.sqrt(2.0 * rate)), (0.0, d_omega))


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings.

    Paths are split into ``n_batches`` batches; batch b draws from its own
    PCG64 stream spawned from ``SeedSequence(seed)``, so results do not
    depend on ``workers`` and batches can run concurrently.
    """

    n_paths: int
    dt: float
    t_max: float
    seed: int = 0
    n_batches: int = 16
    workers: int = 1

    def __post_init__(self):
        if self.n_paths < 1:
            raise ValueError("n_paths must be >= 1")
        if not (0 < self.dt <= self.t_max):
            raise ValueError("need 0 < dt <= t_max")
        if self.n_batches < 1 or self.workers < 1:
            raise ValueError("n_batches and workers must be >= 1")

    @property
    def n_steps(self) -> int:
        return int(round(self.t_max / self.dt))


@dataclass
class InterferenceSeries:
    """Ensemble mean of exp(i phi) on the time grid.

    ``std_error`` is the standard error of the modulus |mean| (the radial
    component of the scatter). ``batch_means`` and ``batch_sizes`` keep the
    per-batch means for resampling error estimates.
    """

    times: np.ndarray
    mean: np.ndarray
    std_error: np.ndarray
    batch_means: Optional[np.ndarray] = None
    batch_sizes: Optional[np.ndarray] = None
    backend: str = ""

    @property
    def modulus(self) -> np.ndarray:
        return np.abs(self.mean)

    @property
    def n_paths(self) -> int:
        return int(self.batch_sizes.sum()) if self.batch_sizes is not None else 0

    @classmethod
    def from_values(cls, times, values, std_error=None) -> "InterferenceSeries":
        times = np.asarray(times, dtype=float)
        values = np.asarray(values, dtype=complex)
        se = np.zeros_like(times) if std_error is None else np.asarray(std_error, dtype=float)
        return cls(times, values, se)


def _radial_std_error(sums: np.ndarray, n: int) -> np.ndarray:
    c, s, cc, sc = sums / n
    ss = 1.0 - cc
    theta = np.arctan2(s, c)
    ct, st = np.cos(theta), np.sin(theta)
    second = ct * ct * cc + 2.0 * ct * st * sc + st * st * ss
    var = np.maximum(second - (c * c + s * s), 0.0)
    if n > 1:
        var = var * n / (n - 1)
    return np.sqrt(var / n)


def simulate_interference(model: PhaseNoiseModel, j: int, k: int, cfg: McConfig,
                          backend: Optional[str] = None) -> InterferenceSeries:
    """Ensemble-averaged interference factor E[exp(i phi_jk(t))] on the dt grid.

    The expectation is ``exp(-rate t) exp(i (omega_k - omega_j) t)`` with
    ``rate = model.rate(j, k)``.
    """
    if not model.shared_noise:
        raise ValueError("the CSL reduction needs one Wiener process shared by all eigenstates")
    n = len(model.sigma)
    for i in (j, k):
        if not 0 <= i < n:
            raise IndexError(f"eigenstate index {i} out of range")
    kern = kernels.get_backend(backend)
    n_steps = cfg.n_steps
    n_batches = min(cfg.n_batches, cfg.n_paths)
    sizes = np.full(n_batches, cfg.n_paths // n_batches)
    sizes[: cfg.n_paths % n_batches] += 1
    offsets = np.concatenate([[0], np.cumsum(sizes)[:-1]])
    seeds = np.random.SeedSequence(cfg.seed).spawn(n_batches)
    d_omega = model.omega[k] - model.omega[j]
    d_sigma = model.sigma_gap(j, k)

    def run(b):
        out = np.zeros((4, n_steps + 1))
        kern.accumulate_phase_paths(np.random.PCG64(seeds[b]), int(sizes[b]), n_steps, cfg.dt,
                                    d_omega, d_sigma, out, int(offsets[b]))
        return out

    if cfg.workers > 1 and n_batches > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            sums = list(pool.map(run, range(n_batches)))
    else:
        sums = [run(b) for b in range(n_batches)]

    total = np.zeros((4, n_steps + 1))
    for s in sums:  # fixed order: independent of scheduling
        total += s
    N = cfg.n_paths
    batch_means = np.array([(s[0] + 1j * s[1]) / m for s, m in zip(sums, sizes)])
    return InterferenceSeries(
        times=np.arange(n_steps + 1) * cfg.dt,
        mean=(total[0] + 1j * total[1]) / N,
        std_error=_radial_std_error(total, N),
        batch_means=batch_means,
        batch_sizes=sizes,
        backend=kern.BACKEND,
    )


@dataclass(frozen=True)
class DecayFit:
    """Result of the log-linear fit ``-ln|E(t)| = intercept + rate t``.

    ``std_error`` is the jackknife (delete-one-batch) error when batch data
    are available, since the grid points share paths and are strongly
    correlated; ``naive_std_error`` is the weighted least-squares error that
    treats the points as independent.
    """

    rate: float
    std_error: float
    intercept: float
    naive_std_error: float
    n_points: int
    method: str


def _wls(t, y, w):
    X = np.column_stack([np.ones_like(t), t])
    sw = np.sqrt(w)
    coef, *_ = np.linalg.lstsq(X * sw[:, None], y * sw, rcond=None)
    cov = np.linalg.inv(X.T @ (X * w[:, None]))
    return coef, cov


def fit_decay_rate(series: InterferenceSeries, t_min: float = 0.0,
                   t_max: Optional[float] = None) -> DecayFit:
    """Weighted least-squares decay rate of |E(t)| over ``[t_min, t_max]``.

    Points are weighted by the inverse variance of ln|E|, i.e.
    ``(|E| / std_error)^2``. Points with zero standard error (e.g. t = 0,
    where every path has phase 0) are left out of a weighted fit; if no
    point has a positive standard error the fit is unweighted.
    """
    t = np.asarray(series.times, dtype=float)
    mod = np.abs(np.asarray(series.mean))
    se = np.asarray(series.std_error, dtype=float)
    sel = t >= t_min
    if t_max is not None:
        sel &= t <= t_max
    if np.any(mod[sel] <= 0):
        raise ValueError("moduli must be positive over the fit window")
    weighted = np.any(se[sel] > 0)
    if weighted:
        sel &= se > 0
    if sel.sum() < 2:
        raise ValueError("need at least two points to fit a decay rate")
    tt, yy = t[sel], -np.log(mod[sel])
    w = (mod[sel] / se[sel]) ** 2 if weighted else np.ones_like(tt)
    coef, cov = _wls(tt, yy, w)
    if weighted:
        naive = math.sqrt(cov[1, 1])
    else:
        resid = yy - (coef[0] + coef[1] * tt)
        dof = max(tt.size - 2, 1)
        naive = math.sqrt(cov[1, 1] * float(resid @ resid) / dof)

    bm, bs = series.batch_means, series.batch_sizes
    if weighted and bm is not None and len(bs) >= 2:
        N = bs.sum()
        pooled = series.mean * N
        rates = []
        for b in range(len(bs)):
            loo = np.abs((pooled - bs[b] * bm[b]) / (N - bs[b]))[sel]
            if np.any(loo <= 0):
                raise ValueError("leave-one-batch-out modulus not positive")
            c_b, _ = _wls(tt, -np.log(loo), w)
            rates.append(c_b[1])
        rates = np.array(rates)
        B = len(rates)
        std = math.sqrt((B - 1) / B * float(np.sum((rates - rates.mean()) ** 2)))
        method = "jackknife"
    else:
        std, method = naive, "wls"
    return DecayFit(float(coef[1]), std, float(coef[0]), naive, int(sel.sum()), method)
