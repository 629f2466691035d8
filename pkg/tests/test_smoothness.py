import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from approxlab.jacobi import SpectralFunction, analyze
from approxlab.smoothness import difference, modulus, modulus_sweep
from approxlab.translation import BackendLimitError
from approxlab.weighted import NormSpec, weighted_norm


def linear():
    c = np.zeros(9)
    c[1] = 1.0
    return SpectralFunction.from_coeffs(c)


@pytest.mark.parametrize("r", [1, 2])
@pytest.mark.parametrize("p,alpha", [(2, 0), (1, 1), ("inf", 1)])
def test_linear_closed_form(r, p, alpha):
    # Delta_t x = (cos^3 t - 1) x, and |cos^3 t - 1| is increasing on [0, pi]
    norm = NormSpec(p, alpha)
    d = 0.4
    rep = modulus(linear(), d, r=r, norm=norm)
    want = (1 - math.cos(d) ** 3) ** r * weighted_norm(lambda x: x, norm)
    assert rep.value == pytest.approx(want, rel=1e-10)
    assert max(rep.argmax_t) == pytest.approx(d)


def test_constant_has_zero_modulus():
    for backend in ("spectral", "direct"):
        rep = modulus(lambda x: np.ones_like(x), 0.5, norm=NormSpec(2, 1), backend=backend)
        assert rep.value < 1e-13


def test_difference_backends_agree():
    sf = analyze(np.exp, N=20)
    x = np.linspace(-0.9, 0.9, 11)
    for ts in ([0.3], [0.3, 0.7]):
        a = difference(sf, ts, backend="spectral")(x)
        b = difference(sf, ts, backend="direct")(x)
        assert np.allclose(a, b, atol=1e-13)


def test_difference_orders_commute():
    sf = analyze(np.cos, N=16)
    a = difference(sf, [0.2, 0.9]).coeffs
    b = difference(sf, [0.9, 0.2]).coeffs
    assert np.allclose(a, b, atol=1e-15)


def test_modulus_backends_agree_on_smooth_input():
    norm = NormSpec(2, 1)
    a = modulus(np.exp, 0.3, norm=norm, backend="spectral", N=24).value
    b = modulus(np.exp, 0.3, norm=norm, backend="direct").value
    assert a == pytest.approx(b, rel=1e-10)


def test_sweep_is_monotone_and_ordered():
    deltas = [0.5, 0.05, 0.2, 0.1]
    reps = modulus_sweep(np.abs, deltas, norm=NormSpec(2, 1))
    assert [r.delta for r in reps] == deltas
    vals = sorted((r.delta, r.value) for r in reps)
    assert all(a[1] <= b[1] for a, b in zip(vals, vals[1:]))


@settings(max_examples=15, deadline=None)
@given(d1=st.floats(0.01, 3.0), d2=st.floats(0.01, 3.0))
def test_monotone_property(d1, d2):
    lo, hi = sorted((d1, d2))
    reps = modulus_sweep(np.exp, [lo, hi], norm=NormSpec(2, 0.5), N=16)
    assert reps[0].value <= reps[1].value


def test_window_warning():
    rep = modulus(np.exp, 0.2, norm=NormSpec(2, 0), N=16)
    assert rep.warnings and "outside inverse window" in rep.warnings[0]
    assert not modulus(np.exp, 0.2, norm=NormSpec(2, 1), N=16).warnings


def test_report_fields():
    rep = modulus(np.exp, 0.2, r=2, norm=NormSpec(2, 1), N=16, grid_per_axis=5)
    assert rep.r == 2 and rep.grid_per_axis == 5 and rep.refinement_rounds == 2
    assert len(rep.argmax_t) == 2
    assert rep.evaluations >= 25


def test_errors():
    with pytest.raises(ValueError):
        modulus(np.exp, 0.0)
    with pytest.raises(ValueError):
        modulus(np.exp, 4.0)
    with pytest.raises(ValueError):
        modulus(np.exp, 0.1, r=0)
    with pytest.raises(ValueError):
        modulus(np.exp, 0.1, grid_per_axis=3)
    with pytest.raises(ValueError):
        modulus(np.exp, 0.1, refinement_rounds=1)
    with pytest.raises(ValueError):
        modulus(np.exp, 0.1, backend="fft")
    with pytest.raises(ValueError):
        difference(np.exp, [])
    with pytest.raises(ValueError):
        difference(np.exp, [4.0])
    with pytest.raises(BackendLimitError):
        difference(np.exp, [0.1] * 4, backend="direct")
