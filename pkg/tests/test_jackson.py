import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from approxlab.jackson import (beta_multipliers, choose_parameters, default_t_order,
                               degree_bound, gamma, jackson_approximant, jackson_direct,
                               jackson_polynomial, jackson_spec, kernel, kernel_moment, t_rule)
from approxlab.jacobi import SpectralFunction, analyze
from approxlab.quadrature import gauss_rule

@pytest.fixture(autouse=True)
def _precision():
    with mp.workdps(25):
        yield


def ref_gamma(q, m):
    K = lambda t: (mp.sin(m * t / 2) / mp.sin(t / 2)) ** (2 * (q + 2))
    return float(mp.quad(lambda t: K(t) * mp.sin(t) ** 3, mp.linspace(0, mp.pi, 2 * m + 1)))


def test_gamma_for_constant_kernel():
    assert gamma(1, 1) == pytest.approx(4 / 3, rel=1e-15)


@pytest.mark.parametrize("q,m", [(1, 2), (1, 5), (2, 3), (3, 4)])
def test_gamma_against_mpmath(q, m):
    assert gamma(q, m) == pytest.approx(ref_gamma(q, m), rel=1e-13)


@pytest.mark.parametrize("q,m", [(1, 3), (2, 6)])
def test_gamma_against_jacobi_rule(q, m):
    # in y = cos t the integral is int K(arccos y) (1 - y^2) dy, a polynomial moment
    rule = gauss_rule(1, 1, 40)
    want = float(np.dot(rule.weights, kernel(q, m, np.arccos(rule.nodes))))
    assert gamma(q, m) == pytest.approx(want, rel=1e-13)


def test_kernel_values():
    assert kernel(1, 4, 0.0) == pytest.approx(4.0 ** 6)
    assert kernel(2, 3, 1e-12) == pytest.approx(3.0 ** 8, rel=1e-12)
    t = 0.7
    assert kernel(1, 3, t) == pytest.approx((math.sin(1.5 * t) / math.sin(t / 2)) ** 6)
    # continuity across the switch to the series expansion
    assert kernel(1, 5, 2.1e-8) == pytest.approx(kernel(1, 5, 1.9e-8), rel=1e-12)


@pytest.mark.parametrize("q,m", [(1, 2), (1, 4), (2, 3)])
def test_kernel_is_cosine_polynomial_of_degree_D(q, m):
    D = degree_bound(q, m)
    n = 4 * (D + 2)
    full = kernel(q, m, 2 * np.pi * np.arange(2 * n) / (2 * n))
    spec = np.abs(np.fft.rfft(full)) / (2 * n)
    assert np.all(spec[D + 1:] < 1e-9 * spec[0])
    assert spec[D] > 1e-6 * spec[0]


def test_first_beta_against_mpmath():
    # R_1(y) = y^3 gives beta_1 in closed integral form
    q, m = 1, 3
    K = lambda t: (mp.sin(m * t / 2) / mp.sin(t / 2)) ** (2 * (q + 2))
    num = mp.quad(lambda t: K(t) * (mp.cos(t) ** 3 - 1) * mp.sin(t) ** 3, [0, mp.pi])
    beta = beta_multipliers(q, m, 12)
    assert beta[0] == pytest.approx(0.0, abs=1e-14)
    assert beta[1] == pytest.approx(float(num) / ref_gamma(q, m), rel=1e-12)


@pytest.mark.parametrize("q,m", [(1, 2), (1, 4), (2, 3)])
def test_beta_is_minus_one_beyond_degree_bound(q, m):
    D = degree_bound(q, m)
    beta = beta_multipliers(q, m, D + 20)
    assert np.max(np.abs(beta[D + 1:] + 1)) < 1e-13


@pytest.mark.parametrize("r", [1, 2, 3, 4])
def test_polynomial_degree_and_constants(r):
    q, m = 1, 3
    D = degree_bound(q, m)
    sf = analyze(np.exp, 40)
    Q = jackson_polynomial(sf, q, m, r)
    assert np.max(np.abs(Q.coeffs[D + 1:])) < 1e-13
    approx = jackson_approximant(sf, q, m, r)
    assert approx.coeffs[0] == pytest.approx(sf.coeffs[0], rel=1e-14)
    one = SpectralFunction.from_coeffs(np.r_[1.0, np.zeros(40)])
    assert jackson_approximant(one, q, m, r)(0.3) == pytest.approx(1.0, abs=1e-14)


def test_approximant_error_shrinks_with_m():
    sf = analyze(np.abs, 96)
    x = np.linspace(-0.9, 0.9, 101)
    errs = []
    for m in (2, 4, 8):
        P = jackson_approximant(sf, 1, m, 1)
        errs.append(np.max(np.abs(P(x) - np.abs(x)) * (1 - x * x)))
    assert errs[0] > errs[1] > errs[2]


@pytest.mark.parametrize("r", [1, 2])
def test_direct_matches_spectral(r):
    q, m = 1, 2
    sf = analyze(np.exp, 30)
    x = np.linspace(-0.8, 0.8, 5 if r == 2 else 9)
    a = jackson_direct(np.exp, q, m, r)(x)
    b = jackson_polynomial(sf, q, m, r)(x)
    assert np.allclose(a, b, atol=1e-12)


def test_direct_limits():
    with pytest.raises(ValueError, match="jackson_polynomial"):
        jackson_direct(np.exp, 1, 2, 3)
    with pytest.raises(ValueError):
        jackson_direct(np.exp, 1, 2, 0)
    with pytest.raises(ValueError):
        jackson_direct(np.exp, 1, 2, 1, t_order=10)


def test_representation_too_short():
    with pytest.raises(IndexError):
        jackson_polynomial(analyze(np.exp, 5), 1, 4)


def test_invalid_parameters():
    with pytest.raises(ValueError):
        gamma(0, 2)
    with pytest.raises(ValueError):
        gamma(1, 1.5)
    with pytest.raises(ValueError):
        jackson_spec(1, 2, 0)
    with pytest.raises(ValueError):
        choose_parameters(0, 1)
    with pytest.raises(ValueError):
        choose_parameters(5, -1)


def test_spec_fields():
    s = jackson_spec(2, 3, 2)
    assert (s.q, s.m, s.r, s.degree_bound) == (2, 3, 2, 8)
    assert s.gamma_m == pytest.approx(gamma(2, 3))


@pytest.mark.parametrize("n,lam,expected", [(1, 1, (1, 1)), (10, 1, (1, 4)), (10, 2, (2, 3)),
                                            (33, 0.5, (1, 11)), (33, 3.9, (2, 9))])
def test_choose_parameters_examples(n, lam, expected):
    assert choose_parameters(n, lam) == expected


@settings(max_examples=60, deadline=None)
@given(n=st.integers(1, 500), lam=st.floats(0, 12))
def test_choose_parameters_properties(n, lam):
    q, m = choose_parameters(n, lam)
    assert 2 * q > lam
    assert degree_bound(q, m) <= n - 1
    assert (n - 1) / (q + 2) < m <= (n - 1) / (q + 2) + 1


def test_moments_scale_like_inverse_m():
    lam = 2.0
    q = 2
    scaled = [kernel_moment(q, m, lam) * m ** lam for m in (4, 8, 16, 32)]
    assert max(scaled) / min(scaled) < 1.5


def test_t_rule_and_order():
    rule = t_rule(64)
    assert rule.weights.sum() == pytest.approx(math.pi, rel=1e-15)
    assert np.all((rule.nodes > 0) & (rule.nodes < math.pi))
    assert default_t_order(1, 2) == 48
    assert default_t_order(3, 10, N=200) == 200 + 45 + 16
