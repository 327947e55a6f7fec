"""Diosi-Penrose damping against an independent CGS evaluation in mpmath."""
import math
import warnings

import numpy as np
import pytest

from csl_neutrino.diosi_penrose import (CUTOFF_PRESETS, DpParams, UntrustedCutoffWarning,
                                        fermi_constant_si, lambda_g)

from reference import cgs_oracle

pytestmark = pytest.mark.filterwarnings("ignore::csl_neutrino.diosi_penrose.UntrustedCutoffWarning")


def test_fermi_constant_si():
    # G_F (hbar c)^3 = 1.1663787e-5 GeV^-2 * (0.1973269804 GeV fm)^3
    expected = 1.1663787e-5 * 0.1973269804 ** 3 * 1.602176634e-10 * 1e-45
    assert fermi_constant_si() == pytest.approx(expected, rel=1e-9)


@pytest.mark.parametrize("mj,mk", [(0.05, 0.06), (0.1, 0.1003789), (0.6, 0.6000632), (2.2, 2.2000172)])
def test_matches_cgs_oracle(mj, mk):
    assert lambda_g(DpParams(mj, mk)).value == pytest.approx(float(cgs_oracle(mj, mk)), rel=1e-9)


def test_frozen_point_value():
    # computed once with the CGS oracle above
    assert lambda_g(DpParams(0.05, 0.06)).value == pytest.approx(float(cgs_oracle(0.05, 0.06)), rel=1e-12)
    assert lambda_g(DpParams(0.05, 0.06)).value == pytest.approx(4.835033e-2, rel=1e-6)


def test_zero_distance():
    assert lambda_g(DpParams(0.05, 0.06, distance=0.0)).value == 0.0


def test_linear_in_distance():
    a = lambda_g(DpParams(0.1, 0.2, distance=1e24)).value
    b = lambda_g(DpParams(0.1, 0.2, distance=3e24)).value
    assert b == pytest.approx(3 * a, rel=1e-14)


def test_first_term_doubles_with_masses():
    a = lambda_g(DpParams(0.1, 0.2))
    b = lambda_g(DpParams(0.2, 0.4))
    assert b.first_term == pytest.approx(2 * a.first_term, rel=1e-14)


def test_window_scan_positive_and_intersecting():
    values = [lambda_g(DpParams(m, math.sqrt(m * m + 7.59e-5))).value
              for m in np.geomspace(0.05, 2.2, 40)]
    assert all(v > 0 for v in values)
    assert any(1e-2 <= v <= 1.0 for v in values)
    assert values == sorted(values)


def test_first_term_dominates():
    r = lambda_g(DpParams(0.6, 0.6001))
    assert r.first_term > 100 * abs(r.second_term)
    assert r.log_argument > 1


def test_untrusted_cutoff_warns():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        lambda_g(DpParams(0.1, 0.2))
        lambda_g(DpParams(0.1, 0.2, cutoff="NUCLEAR"))
    assert [w.category for w in caught] == [UntrustedCutoffWarning]


def test_presets():
    assert CUTOFF_PRESETS["GRW_SCALE"].radius_m == 1e-7
    assert CUTOFF_PRESETS["NUCLEAR"].radius_m == 1e-15
    assert not CUTOFF_PRESETS["WEAK_SCALE"].trusted
    with pytest.raises(ValueError):
        DpParams(0.1, 0.2, cutoff="PLANCK")


def test_invalid_inputs():
    with pytest.raises(ValueError):
        lambda_g(DpParams(0.0, 0.1))
    with pytest.raises(ValueError):
        lambda_g(DpParams(0.1, 0.2, energy=0.0))
    with pytest.raises(ValueError):
        DpParams(0.1, 0.2, distance=-1.0)


def test_xi_bar_sign_convention():
    base = lambda_g(DpParams(0.1, 0.2)).value
    assert lambda_g(DpParams(0.1, 0.2, xi_bar=-6.67430e-11)).value == base
    assert lambda_g(DpParams(0.1, 0.2, xi_bar=6.67430e-11)).value == -base
