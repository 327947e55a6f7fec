"""Command-line interface.

Usage::

    csl-neutrino <subcommand> [--config PATH] [--out PATH] [--format csv|json]
                 [--seed N] [key=value ...]

Exit status is 0 on success, 1 for invalid input and 2 when a requested
check fails.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from typing import Optional

import numpy as np

from . import __version__
from .config import (ConfigError, build_mode, build_model, build_params, build_scenario,
                     load_config)
from .damping import CollapseParams, oscillate, table1, xi
from .decoherence import (ENVIRONMENTS, decoherence_damping, decoherence_rate, flight_path)
from .diosi_penrose import CUTOFF_PRESETS, DpParams, UntrustedCutoffWarning, lambda_g
from .model import NeutrinoModel, Scenario, ur_expansion_error_rate
from .oracles import (DimensionlessRegime, QuadratureError, appendix_b_check, appendix_c_check,
                      dimensional_estimates)
from .phase_noise import McConfig, PhaseNoiseModel, fit_decay_rate, simulate_interference

EXIT_OK, EXIT_INVALID, EXIT_FAILED = 0, 1, 2


def _fmt(value):
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value) + 0.0  # folds -0.0 into 0.0
        if math.isfinite(value):
            return f"{value:.8e}"
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if value is None:
        return ""
    return str(value)


def _json_value(value):
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return float(f"{value:.8e}") if math.isfinite(value) else _fmt(value)
    return value


def render_csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    header = list(rows[0])
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(row.get(col)) for col in header])
    return buf.getvalue()


def render_json(cfg: dict, rows: list, extra: dict) -> str:
    doc = {
        "config_echo": _json_value(cfg),
        "results": _json_value({"rows": rows, **extra}),
        "provenance": {"version": __version__, "seed": cfg["seed"]},
    }
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


# ---------------------------------------------------------------- commands

def _qm_params(params: CollapseParams) -> CollapseParams:
    return CollapseParams(0.0, params.r_C, params.m0c2)


def _pairs(n):
    return [(j, k) for j in range(n) for k in range(j + 1, n)]


def _interference_deficit(model: NeutrinoModel, res) -> np.ndarray:
    # P_csl - P_qm = sum_{j != k} w_j w_k cos(phase_jk) (D_jk - 1) [x decay factors],
    # with D - 1 = expm1(ln D) so that 1e-55 effects are not lost to rounding.
    U = model.mixing
    W = U[res.initial_flavor, :][None, :] * U
    A = res.cos_phases * np.expm1(res.log_damping)
    if res.survival_weights is not None:
        g = np.sqrt(res.survival_weights)
        A = A * np.outer(g, g)
    np.fill_diagonal(A, 0.0)
    return np.einsum("bj,jk,bk->b", W, A, W)


def _oscillation_row(params, model, scenario, mode, beta, res, qm) -> dict:
    row = {
        "E_eV": scenario.p_c,
        "t_s": res.time,
        "initial_flavor": res.initial_flavor,
        "final_flavor": beta,
        "P_csl_dimensionless": res.probabilities[beta],
        "P_qm_dimensionless": qm.probabilities[beta],
        "P_csl_minus_qm_dimensionless": _interference_deficit(model, res)[beta],
    }
    for j, k in _pairs(model.n):
        row[f"xi_{j}{k}_per_s"] = res.xi_matrix[j, k]
        row[f"xi_t_{j}{k}_dimensionless"] = res.xi_t[j, k]
        row[f"log_damping_{j}{k}_dimensionless"] = res.log_damping[j, k]
    return row


def cmd_oscillate(cfg):
    params, model, scenario, mode = (build_params(cfg), build_model(cfg), build_scenario(cfg),
                                     build_mode(cfg))
    if scenario.initial_flavor >= model.n:
        raise ConfigError("scenario.flavor", f"must be < {model.n}")
    res = oscillate(params, model, scenario, mode)
    qm = oscillate(_qm_params(params), model, scenario, mode)
    rows = [_oscillation_row(params, model, scenario, mode, b, res, qm) for b in range(model.n)]
    return rows, {"masses_c2_eV": list(model.masses_c2), "total_probability": res.total}


def _scan_grid(cfg, axis, scenario):
    s = cfg["scan"]
    if s["grid"] is not None:
        grid = s["grid"]
        if not isinstance(grid, list) or not grid:
            raise ConfigError("scan.grid", "grid must be a non-empty list")
        try:
            grid = np.array(grid, dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("scan.grid", "grid entries must be numbers") from None
    else:
        points = s["points"]
        if isinstance(points, bool) or not isinstance(points, int) or points < 1:
            raise ConfigError("scan.points", "expected a positive integer")
        if axis == "energy":
            start, stop = 1e6, 1e19
        else:
            t = scenario.time()
            start, stop = (t * 1e-6, t) if t > 0 else (1e-3, 1.0)
        start = start if s["start"] is None else float(s["start"])
        stop = stop if s["stop"] is None else float(s["stop"])
        if not (0 < start and start <= stop):
            raise ConfigError("scan.start", "need 0 < start <= stop")
        grid = np.geomspace(start, stop, points)
    if np.any(~np.isfinite(grid)) or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigError("scan.grid", "grid must be positive and strictly increasing")
    return grid


def cmd_scan(cfg):
    params, model, scenario, mode = (build_params(cfg), build_model(cfg), build_scenario(cfg),
                                     build_mode(cfg))
    axis = cfg["scan"]["axis"]
    if axis not in ("energy", "time"):
        raise ConfigError("scan.axis", f"expected 'energy' or 'time', got {axis!r}")
    if scenario.initial_flavor >= model.n:
        raise ConfigError("scenario.flavor", f"must be < {model.n}")
    grid = _scan_grid(cfg, axis, scenario)
    qm_params = _qm_params(params)
    m = model.masses_c2
    rows = []
    for x in grid:
        sc = Scenario(energy=float(x), flight_time=scenario.time(),
                      initial_flavor=scenario.initial_flavor) if axis == "energy" \
            else scenario.with_time(float(x))
        res = oscillate(params, model, sc, mode)
        qm = oscillate(qm_params, model, sc, mode)
        t = res.time
        row = {"E_eV": sc.p_c, "t_s": t}
        for b in range(model.n):
            row[f"P_csl_{b}_dimensionless"] = res.probabilities[b]
            row[f"P_qm_{b}_dimensionless"] = qm.probabilities[b]
        row["xi_t_max_dimensionless"] = float(res.xi_t.max())
        row["decoherence_exponent_dimensionless"] = decoherence_damping(
            flight_path(t, cfg["decoherence"]["atmosphere_time"]), sc.p_c)
        row["ur_error_exponent_dimensionless"] = ur_expansion_error_rate(sc.p_c, m[0], m[-1]) * t
        rows.append(row)
    return rows, {"axis": axis}


def cmd_table1(cfg):
    params = build_params(cfg)
    dm2 = cfg["model"]["dm2"]
    if not isinstance(dm2, list) or not dm2:
        raise ConfigError("model.dm2", "expected a non-empty list")
    lightest = float(cfg["model"]["lightest"])
    model = NeutrinoModel.from_splittings([dm2[0]], lightest)
    rows = [{"scenario": r.name, "E_eV": r.energy, "t_s": r.time,
             "xi_t_dimensionless": r.xi_t, "xi_t_ur_dimensionless": r.xi_t_ur}
            for r in table1(params, model, float(dm2[0]))]
    return rows, {}


def cmd_dp(cfg):
    d = cfg["dp"]
    if d["cutoff"] not in CUTOFF_PRESETS:
        raise ConfigError("dp.cutoff", f"unknown preset {d['cutoff']!r}; expected {sorted(CUTOFF_PRESETS)}")
    dm2 = float(cfg["model"]["dm2"][0])
    if d["masses"] is not None:
        if not isinstance(d["masses"], list) or not d["masses"]:
            raise ConfigError("dp.masses", "expected a non-empty list of masses in eV")
        masses = [float(x) for x in d["masses"]]
    else:
        if not 0 < d["min_mass"] <= d["max_mass"]:
            raise ConfigError("dp.min_mass", "need 0 < min_mass <= max_mass")
        masses = list(np.geomspace(d["min_mass"], d["max_mass"], int(d["points"])))
    rows = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", UntrustedCutoffWarning)
        for m in masses:
            mk = math.sqrt(m * m + dm2)
            try:
                p = DpParams(m, mk, energy=float(d["energy"]), distance=float(d["distance"]),
                             cutoff=d["cutoff"])
                r = lambda_g(p)
            except ValueError as exc:
                raise ConfigError("dp", str(exc)) from None
            rows.append({"m_j_eV": m, "m_k_eV": mk, "E_eV": p.energy, "L_m": p.distance,
                         "cutoff_m": p.cutoff_radius, "lambda_G_dimensionless": r.value,
                         "first_term_dimensionless": r.first_term,
                         "second_term_dimensionless": r.second_term,
                         "in_window": 1e-2 <= r.value <= 1.0})
    if caught:
        print(f"warning: {caught[0].message}", file=sys.stderr)
    return rows, {"cutoff_trusted": CUTOFF_PRESETS[d["cutoff"]].trusted}


def cmd_decoherence(cfg):
    scenario = build_scenario(cfg)
    E, t = scenario.p_c, scenario.time()
    t_atm = cfg["decoherence"]["atmosphere_time"]
    if isinstance(t_atm, bool) or not isinstance(t_atm, (int, float)) or t_atm < 0:
        raise ConfigError("decoherence.atmosphere_time", "expected a number >= 0")
    rows = []
    path = flight_path(t, float(t_atm))
    for env, duration in path:
        rate = decoherence_rate(env, E)
        rows.append({"segment": env.label, "E_eV": E, "duration_s": duration,
                     "rate_per_s": rate, "exponent_dimensionless": rate * duration})
    total = decoherence_damping(path, E)
    rows.append({"segment": "TOTAL", "E_eV": E, "duration_s": t,
                 "rate_per_s": total / t if t > 0 else 0.0, "exponent_dimensionless": total})
    return rows, {"environments": sorted(ENVIRONMENTS)}


# ------------------------------------------------------------------ check

def _check_row(group, name, measured, tolerance, passed, condition=None):
    return {"group": group, "name": name, "measured": measured, "tolerance": tolerance,
            "condition_satisfied": condition, "status": passed}


def _status(ok):
    return "PASS" if ok else "FAIL"


def _appendix_b_rows(rtol):
    rows = []
    ys = np.geomspace(10.0, 1e4, 7)
    for a in (1e-3, 1e-1):
        errs = []
        for y in ys:
            try:
                r = appendix_b_check(DimensionlessRegime(float(y), a), rtol=rtol)
            except QuadratureError as exc:
                rows.append(_check_row("appendix_b", f"y={y:.3g} a={a:g}", float("nan"), 1e-3,
                                       f"FAIL ({exc})"))
                errs.append(float("nan"))
                continue
            errs.append(r.relative_error)
            if y >= 1e3:
                status = _status(r.relative_error <= 1e-3)
            else:
                status = "INFO"
            rows.append(_check_row("appendix_b", f"y={y:.3g} a={a:g}", r.relative_error, 1e-3, status))
        mono = all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))
        rows.append(_check_row("appendix_b", f"monotone a={a:g}", float(mono), 0.0, _status(mono)))
    return rows


def _appendix_c_regimes(params, model, scenario, include_violated):
    regimes = []
    for y in (20.0, 100.0, 1e3, 1e4):
        for a_j, a_k in ((1e-3, 0.0), (0.1, 0.05), (1.0, 0.5)):
            for tau in (0.0, 1.0, 100.0):
                regimes.append((f"y={y:g} a=({a_j:g},{a_k:g}) tau={tau:g}",
                                DimensionlessRegime(y, a_j, a_k, tau)))
    m = model.masses_c2
    heavy, light = (m[-1], m[0]) if m[0] > 0 else (m[-1], m[-1] * 0.0)
    regimes.append(("configured scenario",
                    DimensionlessRegime.from_physical(scenario.p_c, heavy, light, scenario.time(),
                                                      params.r_C)))
    if include_violated:
        for a_j, a_k, tau in ((1.0, 0.0, 4.0), (1.0, 0.5, 18.0), (0.1, 0.0, 1e3)):
            y = math.sqrt(tau * (a_j - a_k))
            regimes.append((f"violated y={y:g} a=({a_j:g},{a_k:g}) tau={tau:g}",
                            DimensionlessRegime(y, a_j, a_k, tau)))
    return [(n, r) for n, r in regimes if r.condition_satisfied or include_violated]


def _appendix_c_rows(params, model, scenario, rtol, include_violated):
    rows = []
    for name, regime in _appendix_c_regimes(params, model, scenario, include_violated):
        tol = 1e-6 if regime.tau == 0 else 1e-3
        try:
            r = appendix_c_check(regime, rtol=rtol)
        except QuadratureError as exc:
            rows.append(_check_row("appendix_c", name, float("nan"), tol, f"FAIL ({exc})",
                                   regime.condition_satisfied))
            continue
        if regime.condition_satisfied:
            status = _status(r.deviation <= tol)
        else:
            status = "INFO"  # outside the validity condition: reported, not asserted
        rows.append(_check_row("appendix_c", name, r.deviation, tol, status, r.condition_satisfied))
    return rows


def _dimensional_rows(params, scenario):
    light = 0.1
    heavy = math.sqrt(light * light + 7.59e-5)
    est = dimensional_estimates(params, heavy, light, scenario.p_c, scenario.time())
    if est.xi_exact_t == 0:
        return [_check_row("dimensional", "gamma = 0", 0.0, 0.0, "PASS")]
    d1, d2 = est.orders_apart()
    return [_check_row("dimensional", "xi1_t vs exact (decades)", d1, 10.0, _status(d1 >= 10)),
            _check_row("dimensional", "xi2_t vs exact (decades)", d2, 10.0, _status(d2 >= 10))]


def _identity_rel(params, model, scenario):
    noise = PhaseNoiseModel.from_physics(params, model, scenario)
    worst = 0.0
    for j, k in _pairs(model.n):
        ref = xi(params, model, scenario, j, k)
        got = noise.rate(j, k)
        if ref == 0.0 and got == 0.0:
            continue
        worst = max(worst, abs(got - ref) / abs(ref) if ref else math.inf)
    return worst


def _identity_rows(params, model, scenario, draws, seed):
    rows = []
    worst = _identity_rel(params, model, scenario)
    rows.append(_check_row("mc_identity", "configured model", worst, 1e-12, _status(worst <= 1e-12)))
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(draws):
        p = CollapseParams(10 ** rng.uniform(-32, -18), 10 ** rng.uniform(-7, -3))
        n = int(rng.integers(2, 5))
        mdl = NeutrinoModel.from_splittings(list(10 ** rng.uniform(-5, -1, n - 1)),
                                            float(10 ** rng.uniform(-3, 0.5)))
        sc = Scenario(energy=10 ** rng.uniform(3, 20), flight_time=1.0)
        worst = max(worst, _identity_rel(p, mdl, sc))
    rows.append(_check_row("mc_identity", f"{draws} random draws", worst, 1e-12,
                           _status(worst <= 1e-12)))
    return rows


def cmd_check(cfg):
    params, model, scenario = build_params(cfg), build_model(cfg), build_scenario(cfg)
    c = cfg["check"]
    rtol = float(c["rtol"])
    if not 1e-13 <= rtol <= 1e-2:
        raise ConfigError("check.rtol", "expected a relative tolerance in [1e-13, 1e-2]")
    rows = (_appendix_b_rows(rtol)
            + _appendix_c_rows(params, model, scenario, rtol, bool(c["include_violated"]))
            + _dimensional_rows(params, scenario)
            + _identity_rows(params, model, scenario, int(c["mc_draws"]), int(cfg["seed"])))
    failed = [r for r in rows if r["status"].startswith("FAIL")]
    extra = {"passed": not failed, "n_failed": len(failed)}
    return rows, extra


# ------------------------------------------------------------- montecarlo

def cmd_montecarlo(cfg):
    mc = cfg["montecarlo"]
    try:
        rate = float(mc["rate"])
        if rate < 0:
            raise ConfigError("montecarlo.rate", "must be >= 0")
        noise = PhaseNoiseModel.synthetic(rate, float(mc["d_omega"]))
        mcfg = McConfig(n_paths=int(mc["n_paths"]), dt=float(mc["dt"]), t_max=float(mc["t_max"]),
                        seed=int(cfg["seed"]), n_batches=int(mc["n_batches"]),
                        workers=int(mc["workers"]))
        series = simulate_interference(noise, 0, 1, mcfg, backend=mc["backend"])
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError("montecarlo", str(exc)) from None
    rows = [{"t_s": t, "re_mean_dimensionless": z.real, "im_mean_dimensionless": z.imag,
             "modulus_dimensionless": abs(z), "std_error_dimensionless": se}
            for t, z, se in zip(series.times, series.mean, series.std_error)]
    fit = fit_decay_rate(series)
    extra = {"fit": {"rate_per_s": fit.rate, "std_error_per_s": fit.std_error,
                     "target_rate_per_s": rate, "method": fit.method},
             "backend": series.backend}
    print(f"fitted rate {fit.rate:.6e} +- {fit.std_error:.2e} 1/s (target {rate:.6e})",
          file=sys.stderr)
    return rows, extra


COMMANDS = {
    "oscillate": (cmd_oscillate, "damped transition probabilities with the standard-QM baseline"),
    "scan": (cmd_scan, "probabilities and damping exponents along an energy or time grid"),
    "table1": (cmd_table1, "CSL damping exponent for the cosmogenic, solar and laboratory cases"),
    "dp": (cmd_dp, "Diosi-Penrose damping over a mass grid"),
    "decoherence": (cmd_decoherence, "environmental decoherence along the flight path"),
    "check": (cmd_check, "quadrature and identity checks of the analytic approximations"),
    "montecarlo": (cmd_montecarlo, "phase-noise Monte Carlo of the interference decay"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="TOML configuration file")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), help="output format")
    common.add_argument("--seed", type=int, help="random seed")
    common.add_argument("overrides", nargs="*", metavar="key=value",
                        help="dotted config overrides, e.g. scenario.energy=1e6")
    parser = argparse.ArgumentParser(prog="csl-neutrino", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def run(argv: Optional[list] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        overrides = list(args.overrides)
        if args.seed is not None:
            overrides.append(f"seed={args.seed}")
        if args.format is not None:
            overrides.append(f'output.format="{args.format}"')
        cfg = load_config(args.config, overrides)
        if isinstance(cfg["seed"], bool) or not isinstance(cfg["seed"], int):
            raise ConfigError("seed", "expected an integer")
        fmt = cfg["output"]["format"]
        if fmt not in ("csv", "json"):
            raise ConfigError("output.format", f"expected csv or json, got {fmt!r}")
        func = COMMANDS[args.command][0]
        rows, extra = func(cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except ValueError as exc:  # e.g. perturbative bound in LINEAR mode
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (QuadratureError, FloatingPointError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED

    text = render_csv(rows) if fmt == "csv" else render_json(cfg, rows, extra)
    out = args.out if args.out is not None else cfg["output"]["path"]
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if args.command == "check" and not extra["passed"]:
        print(f"error: {extra['n_failed']} check(s) failed", file=sys.stderr)
        return EXIT_FAILED
    return EXIT_OK


def main(argv: Optional[list] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
