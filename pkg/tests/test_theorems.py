import json
import math

import numpy as np
import pytest

from approxlab.registry import make_function
from approxlab.theorems import (ExperimentSettings, VerifyConfig, bernstein_markov_check, bm_ratios,
                                compute_series, direct_experiment, equivalence_experiment,
                                inverse_experiment, recompute_verdict, report_from_dict,
                                report_label, rhs_series, verify_suite)

CHEAP = ExperimentSettings(quad_order=256, z_order_finite=64, z_order_sup=64, spectral_N=48)


@pytest.fixture(scope="module")
def abs_inf():
    return compute_series(make_function("abs"), "inf", 1.0, 1, (8, 24), CHEAP)


def test_rhs_series_closed_form():
    nu = list(range(1, 11))
    got = rhs_series(nu, [1.0] * 10, 1)
    for n in nu:
        assert got[n] == pytest.approx((n + 1) / (2 * n))
    got = rhs_series(nu, [1.0] * 10, 2)
    assert got[2] == pytest.approx((1 + 8) / 16)


def test_series_shape(abs_inf):
    assert abs_inf["nu"] == list(range(1, 25))
    assert abs_inf["n"] == list(range(8, 25))
    assert len(abs_inf["E"]) == len(abs_inf["omega"]) == 17
    assert abs_inf["E"] == abs_inf["E_all"][7:]


def test_direct_scaling_on_cheap_grid(abs_inf):
    rep = direct_experiment(make_function("abs"), "inf", 1.0, 1, (8, 24), expected_slope=-1,
                            settings=CHEAP, series=abs_inf)
    assert rep.verdict and rep.applicable
    assert rep.slopes["E"] == pytest.approx(-1, abs=0.15)
    assert rep.empirical_constants["C_band"] <= 3


def test_report_roundtrip_through_json(abs_inf):
    rep = direct_experiment(make_function("abs"), "inf", 1.0, 1, (8, 24), expected_slope=-1,
                            settings=CHEAP, series=abs_inf)
    d = json.loads(json.dumps(rep.to_dict()))
    assert recompute_verdict(d) == rep.verdict
    back = report_from_dict(d)
    assert back.series == rep.series
    # tampering with the data changes the audit
    d["series"]["E"][0] *= 100
    assert recompute_verdict(d) is False


def test_verdict_is_pure_function_of_series(abs_inf):
    rep = inverse_experiment(make_function("abs"), "inf", 1.0, 1, (8, 24), settings=CHEAP,
                             series=abs_inf)
    assert recompute_verdict(rep) == rep.verdict
    assert report_label(rep) == "inverse[abs,p=inf,alpha=1,r=1]"


def test_polynomial_is_degenerate():
    f = make_function("phat:k=1")
    s = compute_series(f, 2, 1.0, 1, (8, 12), CHEAP)
    assert max(s["E"]) < 1e-13
    d = direct_experiment(f, 2, 1.0, 1, (8, 12), settings=CHEAP, series=s)
    assert d.verdict and d.checks == {"degenerate": True}
    inv = inverse_experiment(f, 2, 1.0, 1, (8, 12), settings=CHEAP, series=s)
    assert any("degenerate" in n for n in inv.notes)
    eq = equivalence_experiment(f, 2, 1.0, 1, (8, 12), settings=CHEAP, series=s)
    assert "outside_0_2r" in eq.checks


@pytest.mark.parametrize("name", ["exp", "const"])
def test_trivial_functions_pass(name):
    f = make_function(name)
    s = compute_series(f, 2, 1.0, 1, (8, 16), CHEAP)
    eq = equivalence_experiment(f, 2, 1.0, 1, (8, 16), settings=CHEAP, series=s)
    assert eq.verdict and "outside_0_2r" in eq.checks
    inv = inverse_experiment(f, 2, 1.0, 1, (8, 16), settings=CHEAP, series=s)
    assert inv.verdict
    if name == "const":
        assert inv.empirical_constants["C_max"] == 0.0
        assert direct_experiment(f, 2, 1.0, 1, (8, 16), settings=CHEAP, series=s).verdict


def test_saturation_guard_for_smooth_kink():
    # |x|^3 decays like n^{-3.5} at p = 2, beyond 2r = 2
    f = make_function("abs:lam=3")
    rep = equivalence_experiment(f, 2, 1.0, 1, (8, 20), settings=CHEAP)
    assert rep.slopes["lambda_E"] > 2
    assert "outside_0_2r" in rep.checks
    assert rep.checks["omega_saturated"]
    assert any("no equivalence claim" in n for n in rep.notes)


def test_window_flags():
    f = make_function("exp")
    s = {"nu": [1, 2], "E_all": [1.0, 0.5], "n": [1, 2], "E": [1.0, 0.5], "omega": [1.0, 0.5]}
    rep = direct_experiment(f, "inf", 3.0, 1, (1, 2), settings=CHEAP, series=s)
    assert not rep.applicable
    assert any("not applicable" in n for n in rep.notes)
    rep = inverse_experiment(f, 2, 0.0, 1, (1, 2), settings=CHEAP, series=s)
    assert not rep.applicable


def test_inverse_infinite_constant_fails():
    s = {"nu": [1, 2, 3], "E_all": [0.0, 0.0, 0.0], "n": [2, 3], "E": [0.0, 0.0],
         "omega": [0.1, 0.1]}
    rep = inverse_experiment(make_function("exp"), 2, 1.0, 1, (2, 3), settings=CHEAP, series=s)
    assert rep.checks["finite"] is False
    assert not rep.verdict
    assert json.loads(json.dumps(rep.to_dict()))["empirical_constants"]["C_max"] == "inf"


def test_bernstein_markov_small_range():
    rep = bernstein_markov_check(2, 1.0, (4, 16), rhos=(0.5,), n_random=2)
    assert set(rep.series) == {"n", "markov", "rho=0.5"}
    assert rep.checks["markov"] and rep.checks["rho=0.5"]
    assert rep.verdict
    assert recompute_verdict(rep)


def test_bernstein_markov_runs_for_sup_norm():
    a = bernstein_markov_check(2, 1.0, (4, 8), rhos=(1.0,), n_random=16, seed=3)
    b = bernstein_markov_check("inf", 1.0, (4, 8), rhos=(1.0,), n_random=16, seed=3,
                               quad_order=256)
    assert a.series["n"] == b.series["n"]
    assert all(v > 0 for v in a.series["rho=1"])


def test_bm_ratios_for_identity():
    # P = x at (2, 1): int x^2 (1-x^2)^2 = 16/105, int (1-x^2)^3 = 32/35,
    # int x^2 (1-x^2)^3 = 32/315, int x^2 (1-x^2)^4 = 256/3465
    got = bm_ratios([0.0, 1.0], 2, 1.0, rhos=(0.5, 1.0))
    assert got["markov"] == pytest.approx(math.sqrt((32 / 35) / (16 / 105)) / 2, rel=1e-9)
    assert got["rho=0.5"] == pytest.approx(math.sqrt((16 / 105) / (32 / 315)) / 2, rel=1e-9)
    assert got["rho=1"] == pytest.approx(math.sqrt((16 / 105) / (256 / 3465)) / 4, rel=1e-9)


def test_bernstein_markov_constants_have_zero_derivative_ratio():
    rep = bernstein_markov_check(2, 1.0, (1, 4), n_random=2)
    assert rep.series["markov"][0] == 0.0
    assert any("n = 1" in n for n in rep.notes)


def test_bernstein_markov_bad_range():
    with pytest.raises(ValueError):
        bernstein_markov_check(2, 1.0, (0, 4))


def test_verify_suite_without_experiments():
    rep = verify_suite(VerifyConfig(functions=("exp", "abs"), experiments=False))
    assert rep.verdict, rep.notes
    assert rep.experiments == []
    assert "translation.eigen_aux2" in rep.series["check"]
    assert recompute_verdict(rep)


def test_verify_suite_rejects_empty_family():
    with pytest.raises(ValueError):
        verify_suite(VerifyConfig(functions=()))


def test_tolerance_override_tightens():
    rep = verify_suite(VerifyConfig(functions=("exp",), experiments=False, tol=1e-30))
    assert not rep.verdict
    assert any(n.startswith("FAIL quadrature.mass") for n in rep.notes)
