import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from approxlab.jacobi import SpectralFunction, analyze, basis22, eval_basis
from approxlab.quadrature import gauss_rule
from approxlab.translation import (BackendLimitError, chebyshev_rule, iterated_direct,
                                   kernel_weight, multiplier_table, multipliers, orbit,
                                   translate_direct, translate_hat, translate_spectral)

@pytest.fixture(autouse=True)
def _precision():
    with mp.workdps(20):
        yield


def ref_translate(f, x, y, variant="full"):
    """``T_y f(x)`` by adaptive quadrature over ``phi`` with ``z = cos phi``."""
    x, y = mp.mpf(x), mp.mpf(y)
    sx, sy = mp.sqrt(1 - x * x), mp.sqrt(1 - y * y)

    def integrand(phi):
        z = mp.cos(phi)
        R = x * y - z * sx * sy
        if variant == "aux2":
            return 8 / (3 * mp.pi) * (1 - z * z) ** 2 * f(R)
        k = 1 - R * R - 2 * (1 - y * y) * (1 - z * z)
        if variant == "full":
            k += 4 * (1 - x * x) * (1 - y * y) * (1 - z * z) ** 2
        return k * f(R) / (mp.pi * (1 - x * x))

    return float(mp.quad(integrand, [0, mp.pi]))


def phat(k):
    return lambda s: mp.jacobi(k, 2, 2, s) / mp.jacobi(k, 2, 2, 1)


@pytest.mark.parametrize("variant", ["full", "aux1", "aux2"])
@pytest.mark.parametrize("x,y", [(0.3, 0.5), (-0.7, 0.9), (0.05, -0.4)])
def test_direct_against_mpmath(variant, x, y):
    got = translate_direct(np.exp, y, variant)(np.array([x]))[0]
    assert got == pytest.approx(ref_translate(mp.exp, x, y, variant), rel=1e-13)


def test_constant_is_fixed():
    x = np.linspace(-0.95, 0.95, 9)
    for y in (-0.8, 0.0, 0.6, 1.0):
        assert np.allclose(translate_direct(lambda s: np.ones_like(s), y)(x), 1, atol=1e-14)


def test_identity_at_y_one():
    x = np.linspace(-0.9, 0.9, 7)
    assert np.allclose(translate_direct(np.exp, 1.0)(x), np.exp(x), atol=1e-14)


def test_first_multiplier_is_cube():
    for y in (-0.7, 0.2, 0.55, 0.99):
        tab = multiplier_table(8, y)
        assert tab.full[0] == pytest.approx(1, abs=1e-14)
        assert tab.full[1] == pytest.approx(y ** 3, abs=1e-14)


@pytest.mark.parametrize("k", [2, 3, 6])
def test_eigenfunction_against_mpmath(k):
    # T_y P_k = R_k(y) P_k pointwise, with the ratio taken from an independent evaluation
    y = 0.45
    f = phat(k)
    ratios = [ref_translate(f, x, y) / float(f(x)) for x in (0.21, -0.38, 0.67)]
    assert max(ratios) - min(ratios) < 1e-12
    assert multiplier_table(10, y).full[k] == pytest.approx(ratios[0], abs=1e-12)


@pytest.mark.parametrize("y", [-0.6, 0.1, 0.8])
def test_aux2_multipliers_are_basis_values(y):
    tab = multiplier_table(30, y)
    want = basis22(30).vandermonde(np.array(y))
    assert np.allclose(tab.aux2, want, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(y=st.floats(-1, 1))
def test_full_splits_into_auxiliaries(y):
    tab = multiplier_table(20, y)
    assert np.allclose(tab.full, tab.aux1 + 1.5 * (1 - y * y) * tab.aux2, atol=1e-13)


@settings(max_examples=25, deadline=None)
@given(y=st.floats(-1, 1))
def test_multipliers_bounded(y):
    tab = multiplier_table(24, y)
    assert np.all(np.abs(tab.aux2) <= 1 + 1e-12)
    assert tab.full[0] == pytest.approx(1, abs=1e-13)


def test_spectral_matches_direct():
    sf = analyze(np.exp, N=24)
    x = np.linspace(-0.9, 0.9, 13)
    for variant in ("full", "aux1", "aux2"):
        spec = translate_spectral(sf, [0.3, -0.5], variant)(x)
        direct = iterated_direct(sf, [0.3, -0.5], variant)(x)
        assert np.allclose(spec, direct, atol=1e-13)


def test_self_adjoint():
    rule = gauss_rule(2, 2, 48)
    x = rule.nodes
    f, g = np.exp, lambda s: np.cos(3 * s)
    for variant in ("full", "aux1", "aux2"):
        T = lambda h: translate_direct(h, 0.35, variant)
        lhs = np.dot(rule.weights, T(f)(x) * g(x))
        rhs = np.dot(rule.weights, f(x) * T(g)(x))
        assert lhs == pytest.approx(rhs, rel=1e-12)


def test_angular_form_is_even_in_t():
    x = np.linspace(-0.9, 0.9, 11)
    for t in (0.3, 1.2, 2.5):
        a = translate_hat(np.exp, t)(x)
        b = translate_hat(np.exp, -t)(x)
        c = translate_direct(np.exp, math.cos(t))(x)
        assert np.allclose(a, b, atol=1e-14)
        assert np.allclose(a, c, atol=1e-13)


def test_kernel_weight_and_orbit():
    assert orbit(0.0, 0.0, 1.0) == pytest.approx(-1.0)
    assert orbit(0.5, 1.0, 0.3) == pytest.approx(0.5)
    R = orbit(0.2, 0.7, np.linspace(-1, 1, 9))
    assert np.all(np.abs(R) <= 1)
    assert kernel_weight("aux2", 0.1, 0.5, 0.0) == pytest.approx(8 / (3 * math.pi))


def test_errors():
    with pytest.raises(ValueError):
        translate_direct(np.exp, 0.5, "half")
    with pytest.raises(ValueError):
        translate_direct(np.exp, 1.5)
    with pytest.raises(ValueError):
        translate_direct(np.exp, 0.5)(np.array([1.0]))
    with pytest.raises(ValueError):
        translate_direct(np.exp, 0.5, z_rule=gauss_rule(0, 0, 16))
    with pytest.raises(BackendLimitError):
        iterated_direct(np.exp, [0.1, 0.2, 0.3, 0.4])
    with pytest.raises(ValueError):
        iterated_direct(np.exp, [])
    sf = analyze(np.exp, N=10)
    with pytest.raises(IndexError):
        translate_spectral(sf, [0.3], tables=[np.ones(5)])


def test_table_selection():
    tab = multipliers(6, 0.4, "aux1")
    assert tab.variant == "aux1"
    assert np.array_equal(tab.values, tab.aux1)
    assert tab.degree == 6
    assert tab.bound == pytest.approx(np.max(np.abs(tab.aux1)))


def test_spectral_polynomial_degree_preserved():
    c = np.zeros(13)
    c[7] = 1.0
    out = translate_spectral(SpectralFunction.from_coeffs(c), [0.2])
    assert np.count_nonzero(np.abs(out.coeffs) > 1e-15) == 1
    assert out.coeffs[7] == pytest.approx(multiplier_table(12, 0.2).full[7])


def test_chebyshev_rule_default():
    assert chebyshev_rule().order == 64
