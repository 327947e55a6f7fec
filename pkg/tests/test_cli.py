import csv
import io
import json
import math
import subprocess
import sys

import pytest

from csl_neutrino import __version__
from csl_neutrino.cli import render_csv, run
from csl_neutrino.constants import CONSTANTS
from csl_neutrino.model import NeutrinoModel, Scenario, energy_gap

pytestmark = pytest.mark.filterwarnings("ignore::csl_neutrino.diosi_penrose.UntrustedCutoffWarning")


def invoke(capsys, *argv):
    code = run(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def col(rows, name):
    return [float(r[name]) for r in rows]


# -------------------------------------------------------------- oscillate

def test_default_oscillate_shows_cosmogenic_exponent(capsys):
    code, out, _ = invoke(capsys, "oscillate")
    assert code == 0
    rows = rows_of(out)
    assert len(rows) == 2
    assert float(rows[0]["xi_t_01_dimensionless"]) == pytest.approx(2.31e-55, rel=0.02)
    # nine significant digits per printed value
    assert sum(col(rows, "P_csl_dimensionless")) == pytest.approx(1.0, abs=2e-9)


def test_deficit_column_keeps_tiny_effect(capsys):
    _, out, _ = invoke(capsys, "oscillate")
    rows = rows_of(out)
    deficit = col(rows, "P_csl_minus_qm_dimensionless")
    assert deficit[0] != 0.0 and abs(deficit[0]) < 1e-54
    assert deficit[0] == pytest.approx(-deficit[1], rel=1e-8)


def test_time_zero_is_kronecker_row(capsys):
    code, out, _ = invoke(capsys, "oscillate", "scenario.time=0", "scenario.flavor=1")
    assert code == 0
    rows = rows_of(out)
    assert col(rows, "P_csl_dimensionless") == [0.0, 1.0]
    assert "-0.0" not in out


def test_maximal_mixing_half_period(capsys):
    model = NeutrinoModel.two_flavor(math.pi / 4)
    E = 1e6
    t = math.pi * CONSTANTS.hbar / abs(float(energy_gap(Scenario(energy=E, flight_time=1.0), model, 1, 0)))
    code, out, _ = invoke(capsys, "oscillate", "collapse.gamma=0.0", f"model.angles=[{math.pi / 4!r}]",
                          f"scenario.energy={E!r}", f"scenario.time={t!r}")
    assert code == 0
    assert float(rows_of(out)[0]["P_csl_dimensionless"]) <= 1e-12


def test_linear_mode_outside_bound_is_invalid(capsys):
    code, _, err = invoke(capsys, "oscillate", 'mode="LINEAR"', "collapse.gamma=1e40")
    assert code == 1
    assert "perturbative" in err


# ------------------------------------------------------------------- scan

def test_single_point_scan_equals_oscillate(capsys):
    _, osc, _ = invoke(capsys, "oscillate", "scenario.energy=1e9")
    _, scan, _ = invoke(capsys, "scan", "scan.grid=[1e9]")
    o, s = rows_of(osc), rows_of(scan)
    assert len(s) == 1
    for b in range(2):
        assert s[0][f"P_csl_{b}_dimensionless"] == o[b]["P_csl_dimensionless"]
        assert s[0][f"P_qm_{b}_dimensionless"] == o[b]["P_qm_dimensionless"]
    assert s[0]["xi_t_max_dimensionless"] == o[0]["xi_t_01_dimensionless"]


def test_solar_scan_row(capsys):
    code, out, _ = invoke(capsys, "scan", "scan.grid=[1e6]", "scenario.time=500.0")
    assert code == 0
    row = rows_of(out)[0]
    assert float(row["xi_t_max_dimensionless"]) == pytest.approx(3.66e-45, rel=0.02)
    dec = float(row["decoherence_exponent_dimensionless"])
    assert 1e-19 <= dec <= 1e-17


def test_energy_scan_falls_as_inverse_square(capsys):
    _, out, _ = invoke(capsys, "scan", "scan.points=9")
    rows = rows_of(out)
    E, xt = col(rows, "E_eV"), col(rows, "xi_t_max_dimensionless")
    assert all(b < a for a, b in zip(xt, xt[1:]))
    for (e1, x1), (e2, x2) in zip(zip(E, xt), zip(E[1:], xt[1:])):
        assert x2 / x1 == pytest.approx((e1 / e2) ** 2, rel=2e-8)  # printed to 9 digits


def test_time_scan(capsys):
    code, out, _ = invoke(capsys, "scan", 'scan.axis="time"', "scan.points=4")
    assert code == 0
    t, xt = col(rows_of(out), "t_s"), col(rows_of(out), "xi_t_max_dimensionless")
    assert xt[-1] / xt[0] == pytest.approx(t[-1] / t[0], rel=2e-8)


@pytest.mark.parametrize("override,key", [("scan.grid=[]", "scan.grid"),
                                          ("scan.grid=[2.0, 1.0]", "scan.grid"),
                                          ("scan.grid=[-1.0]", "scan.grid"),
                                          ('scan.axis="mass"', "scan.axis")])
def test_bad_grid_rejected(capsys, override, key):
    code, out, err = invoke(capsys, "scan", override)
    assert code == 1 and out == ""
    assert key in err


# ----------------------------------------------------------------- config

def test_unknown_key_names_path(capsys):
    code, _, err = invoke(capsys, "oscillate", "scenario.enrgy=1e6")
    assert code == 1
    assert "scenario.enrgy" in err


def test_unknown_key_in_file(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[collapse]\ngama = 1e-20\n")
    code, _, err = invoke(capsys, "table1", "--config", str(cfg))
    assert code == 1 and "collapse.gama" in err


def test_flags_override_file(tmp_path, capsys):
    cfg = tmp_path / "run.toml"
    cfg.write_text("[scenario]\nenergy = 1e9\ntime = 1.0\n")
    _, out, _ = invoke(capsys, "oscillate", "--config", str(cfg), "scenario.energy=1e12")
    row = rows_of(out)[0]
    assert float(row["E_eV"]) == 1e12 and float(row["t_s"]) == 1.0


# ---------------------------------------------------------- other commands

def test_table1(capsys):
    _, out, _ = invoke(capsys, "table1")
    xt = col(rows_of(out), "xi_t_dimensionless")
    for got, want in zip(xt, (2.31e-55, 3.66e-45, 1.56e-57)):
        assert got == pytest.approx(want, rel=0.02)


def test_dp_window(capsys):
    code, out, err = invoke(capsys, "dp")
    assert code == 0
    assert "warning" in err
    rows = rows_of(out)
    assert any(r["in_window"] == "true" for r in rows)


def test_dp_unknown_cutoff(capsys):
    code, _, err = invoke(capsys, "dp", 'dp.cutoff="PLANCK"')
    assert code == 1 and "dp.cutoff" in err


def test_decoherence(capsys):
    _, out, _ = invoke(capsys, "decoherence")
    total = rows_of(out)[-1]
    assert total["segment"] == "TOTAL"
    assert 1e-6 <= float(total["exponent_dimensionless"]) <= 1e-4


# ------------------------------------------------------------------ check

def test_check_default_passes(capsys):
    code, out, _ = invoke(capsys, "check", "check.mc_draws=20")
    assert code == 0
    rows = rows_of(out)
    assert {r["group"] for r in rows} == {"appendix_b", "appendix_c", "dimensional", "mc_identity"}
    assert not [r for r in rows if r["status"].startswith("FAIL")]
    assert all(r["condition_satisfied"] == "true" for r in rows if r["group"] == "appendix_c")


def test_check_violated_rows_do_not_fail(capsys):
    code, out, _ = invoke(capsys, "check", "check.include_violated=true", "check.mc_draws=5")
    assert code == 0
    rows = [r for r in rows_of(out) if r["group"] == "appendix_c"]
    violated = [r for r in rows if r["condition_satisfied"] == "false"]
    assert violated
    assert all(r["status"] == "INFO" for r in violated)


def test_check_gamma_zero_identity(capsys):
    code, out, _ = invoke(capsys, "check", "collapse.gamma=0.0", "check.mc_draws=0")
    assert code == 0
    ident = [r for r in rows_of(out) if r["group"] == "mc_identity"]
    assert ident[0]["status"] == "PASS" and float(ident[0]["measured"]) == 0.0


def test_check_failure_exits_2(capsys, monkeypatch):
    from csl_neutrino import cli

    def no_convergence(*args, **kwargs):
        raise cli.QuadratureError("did not converge")

    monkeypatch.setattr(cli, "appendix_c_check", no_convergence)
    code, out, err = invoke(capsys, "check", "check.mc_draws=0")
    assert code == 2
    assert "FAIL (did not converge)" in out and "failed" in err


def test_check_rtol_out_of_range(capsys):
    code, _, err = invoke(capsys, "check", "check.rtol=1e-30")
    assert code == 1 and "check.rtol" in err


# ------------------------------------------------------------- montecarlo

def test_montecarlo_small(capsys):
    code, out, err = invoke(capsys, "montecarlo", "montecarlo.n_paths=2000", "montecarlo.t_max=2.0",
                            "montecarlo.dt=0.05", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    fit = doc["results"]["fit"]
    assert abs(fit["rate_per_s"] - 0.1) <= 4 * fit["std_error_per_s"]
    assert "fitted rate" in err


def test_montecarlo_bad_paths(capsys):
    code, _, err = invoke(capsys, "montecarlo", "montecarlo.n_paths=0")
    assert code == 1 and "montecarlo" in err


# ----------------------------------------------------------------- output

def test_byte_identical_runs(capsys):
    args = ("montecarlo", "montecarlo.n_paths=500", "montecarlo.t_max=1.0", "--seed", "11")
    _, a, _ = invoke(capsys, *args)
    _, b, _ = invoke(capsys, *args)
    _, c, _ = invoke(capsys, *args[:-1], "12")
    assert a == b and a != c


@pytest.mark.parametrize("command", ["oscillate", "scan", "table1", "dp", "decoherence"])
def test_csv_header_units(capsys, command):
    _, out, _ = invoke(capsys, command)
    header = out.splitlines()[0].split(",")
    suffixes = ("_eV", "_s", "_per_s", "_dimensionless", "_m")
    labels = {"initial_flavor", "final_flavor", "scenario", "segment", "in_window"}
    assert all(h.endswith(suffixes) or h in labels for h in header)
    assert "\r" not in out


def test_json_structure(capsys):
    _, out, _ = invoke(capsys, "oscillate", "--format", "json", "--seed", "5")
    doc = json.loads(out)
    assert set(doc) == {"config_echo", "results", "provenance"}
    assert doc["provenance"] == {"version": __version__, "seed": 5}
    assert doc["config_echo"]["scenario"]["energy"] == 1e19
    assert doc["results"]["rows"][0]["xi_t_01_dimensionless"] == pytest.approx(2.31361878e-55, rel=1e-8)


def test_out_file(tmp_path, capsys):
    path = tmp_path / "t1.csv"
    code, out, _ = invoke(capsys, "table1", "--out", str(path))
    assert code == 0 and out == ""
    data = path.read_bytes()
    assert data.startswith(b"scenario,E_eV") and b"\r\n" not in data


def test_extreme_exponents_not_flushed():
    text = render_csv([{"x_dimensionless": 2.31361878e-55}, {"x_dimensionless": 1e-300}])
    assert text == "x_dimensionless\n2.31361878e-55\n1.00000000e-300\n"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "csl_neutrino", "table1"], capture_output=True,
                         text=True)
    assert out.returncode == 0
    assert out.stdout.splitlines()[1].startswith("cosmogenic")


def test_missing_subcommand():
    with pytest.raises(SystemExit) as exc:
        run([])
    assert exc.value.code == 2
