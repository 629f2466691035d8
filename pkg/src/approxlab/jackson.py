"""Jackson-type kernel and the polynomial operator built from averaged differences.

The kernel is ``K_{q,m}(t) = (sin(m t / 2) / sin(t / 2))^{2(q+2)}``, a cosine
polynomial of degree ``D = (q+2)(m-1)``.  With
``gamma_m = int_0^pi K(t) sin^3 t dt`` the operator is

    Q(x) = gamma_m^{-r} int ... int (Delta^r_{t_1..t_r} f(x) - (-1)^r f(x))
           prod_s K(t_s) sin^3 t_s dt_s.

Since ``Delta`` is diagonal in the ``P_k^{(2,2)}`` basis, the r-fold integral
factorizes: ``c_k(Q) = (beta_k^r - (-1)^r) c_k(f)`` with
``beta_k = gamma_m^{-1} int K(t) (R_k(cos t) - 1) sin^3 t dt``.  For ``k > D``
one has ``beta_k = -1``, so ``Q`` is a polynomial of degree at most ``D``, and
``(-1)^{r+1} Q`` is the approximant of ``f`` (it reproduces constants).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jacobi import SpectralFunction
from .quadrature import QuadratureRule, gauss_rule
from .translation import _CHUNK, _check_open, _kernel, chebyshev_rule, multiplier_table, orbit
from .weighted import Function, as_function

__all__ = [
    "JacksonSpec",
    "kernel",
    "gamma",
    "t_rule",
    "beta_multipliers",
    "jackson_spec",
    "jackson_polynomial",
    "jackson_approximant",
    "jackson_direct",
    "choose_parameters",
    "kernel_moment",
    "MAX_DIRECT_R",
    "MIN_T_ORDER",
]

MAX_DIRECT_R = 2
MIN_T_ORDER = 48


@dataclass(frozen=True)
class JacksonSpec:
    q: int
    m: int
    r: int
    degree_bound: int
    gamma_m: float


def _check_qm(q, m):
    if int(q) != q or q < 1:
        raise ValueError(f"q must be a natural number, got {q}")
    if int(m) != m or m < 1:
        raise ValueError(f"m must be a natural number, got {m}")


def degree_bound(q: int, m: int) -> int:
    return (q + 2) * (m - 1)


def kernel(q: int, m: int, t):
    """``(sin(m t/2) / sin(t/2))^{2(q+2)}``, equal to ``m^{2(q+2)}`` at ``t = 0``."""
    _check_qm(q, m)
    t = np.asarray(t, dtype=float)
    s = np.sin(t / 2)
    small = np.abs(s) < 1e-8
    safe = np.where(small, 1.0, s)
    # second-order expansion of the ratio near t = 0
    ratio = np.where(small, m * (1 - (m * m - 1) * t * t / 24), np.sin(m * t / 2) / safe)
    out = ratio ** (2 * (q + 2))
    return out if out.ndim else float(out)


def t_rule(n: int) -> QuadratureRule:
    """Gauss-Legendre rule mapped from [-1, 1] to [0, pi]."""
    g = gauss_rule(0.0, 0.0, n)
    return QuadratureRule((0.0, 0.0), (g.nodes + 1) * (math.pi / 2), g.weights * (math.pi / 2))


def default_t_order(q: int, m: int, N: int = 0) -> int:
    """``4 (D + 4)``, raised so that ``R_k(cos t)`` for ``k <= N`` is also resolved."""
    D = degree_bound(q, m)
    return max(MIN_T_ORDER, 4 * (D + 4), N + D + 16)


def _weights(q, m, order):
    rule = t_rule(order)
    w = rule.weights * kernel(q, m, rule.nodes) * np.sin(rule.nodes) ** 3
    return rule.nodes, w


@lru_cache(maxsize=256)
def _gamma(q, m, order):
    return float(np.sum(_weights(q, m, order)[1]))


def gamma(q: int, m: int, order: int | None = None) -> float:
    """``int_0^pi K(t) sin^3 t dt``."""
    _check_qm(q, m)
    return _gamma(int(q), int(m), int(order or default_t_order(q, m)))


@lru_cache(maxsize=256)
def _beta(q, m, N, order, z_order):
    t, w = _weights(q, m, order)
    R = np.array([multiplier_table(N, float(math.cos(ti)), z_order).full for ti in t])
    b = (w @ (R - 1.0)) / np.sum(w)
    b.setflags(write=False)
    return b


def beta_multipliers(q: int, m: int, N: int, order: int | None = None,
                     z_order: int | None = None) -> np.ndarray:
    """``beta_k = gamma_m^{-1} int K(t) (R_k(cos t) - 1) sin^3 t dt`` for ``k = 0..N``."""
    _check_qm(q, m)
    order = int(order or default_t_order(q, m, N))
    return _beta(int(q), int(m), int(N), order, z_order)


def jackson_spec(q: int, m: int, r: int) -> JacksonSpec:
    if r < 1:
        raise ValueError("order r must be >= 1")
    return JacksonSpec(q, m, r, degree_bound(q, m), gamma(q, m))


def jackson_polynomial(sf: SpectralFunction, q: int, m: int, r: int = 1,
                       order: int | None = None) -> SpectralFunction:
    """Coefficients ``(beta_k^r - (-1)^r) c_k`` of ``Q``."""
    if r < 1:
        raise ValueError("order r must be >= 1")
    D = degree_bound(q, m)
    if sf.degree < D:
        raise IndexError(f"need a representation of degree >= {D}, got {sf.degree}")
    beta = beta_multipliers(q, m, sf.degree, order)
    mult = beta ** r - (-1) ** r
    # beyond the degree bound beta_k = -1 up to quadrature error; the product is zero
    return sf.with_coeffs(np.asarray(sf.coeffs) * mult)


def jackson_approximant(sf: SpectralFunction, q: int, m: int, r: int = 1) -> SpectralFunction:
    """``(-1)^{r+1} Q``, the polynomial approximating ``f``."""
    Q = jackson_polynomial(sf, q, m, r)
    return Q.with_coeffs((-1) ** (r + 1) * np.asarray(Q.coeffs))


class _Averaged(Function):
    """``x -> sum_i w_i T_{y_i} g(x)`` with normalized kernel weights ``w_i``."""

    def __init__(self, g, ys, ws, z_rule):
        self.g = as_function(g)
        self.ys = np.asarray(ys, dtype=float)
        self.ws = np.asarray(ws, dtype=float)
        self.z_rule = z_rule
        super().__init__(self._apply, "avgT")

    def _apply(self, x):
        _check_open(x)
        shape = x.shape
        flat = x.reshape(-1)
        z, wz = self.z_rule.nodes, self.z_rule.weights
        Y = self.ys[None, :, None]
        Z = z[None, None, :]
        out = np.empty(flat.shape)
        step = max(1, _CHUNK // (len(z) * len(self.ys)))
        for lo in range(0, flat.size, step):
            X = flat[lo: lo + step, None, None]
            R = orbit(X, Y, Z)
            K = _kernel("full", X, Y, Z, R)
            out[lo: lo + step] = ((K * self.g(R)) @ wz) @ self.ws
        return out.reshape(shape)


def jackson_direct(f, q: int, m: int, r: int = 1, t_order: int | None = None,
                   z_rule: QuadratureRule | None = None) -> Function:
    """Pointwise ``Q`` by literal quadrature in every ``t_s`` and ``z``.

    Cost per point grows like ``(t_order * z_order)^r``, hence ``r <= 2``.
    """
    if r > MAX_DIRECT_R:
        raise ValueError(f"jackson_direct supports r <= {MAX_DIRECT_R}; "
                         "use jackson_polynomial for higher orders")
    if r < 1:
        raise ValueError("order r must be >= 1")
    _check_qm(q, m)
    t_order = int(t_order or default_t_order(q, m))
    if t_order < MIN_T_ORDER:
        raise ValueError(f"t quadrature order must be >= {MIN_T_ORDER}")
    z_rule = z_rule or chebyshev_rule()
    t, w = _weights(q, m, t_order)
    ys, ws = np.cos(t), w / np.sum(w)
    f = as_function(f)
    g = f
    for _ in range(r):
        A = _Averaged(g, ys, ws, z_rule)
        # averaged difference: sum_i w_i (T_i g - g) with sum_i w_i = 1
        g = Function(lambda x, A=A, h=g: A(x) - h(x), "avgDelta")
    sign = (-1) ** r
    return Function(lambda x: g(x) - sign * f(x), f"Q[{q},{m},{r}]")


def choose_parameters(n: int, lam: float, r: int = 1) -> tuple[int, int]:
    """Smallest ``q`` with ``2q > lam`` and the integer ``m`` in
    ``((n-1)/(q+2), (n-1)/(q+2) + 1]``, so that ``D <= n - 1``."""
    if n < 1:
        raise ValueError("degree bound n must be >= 1")
    if r < 1:
        raise ValueError("order r must be >= 1")
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    q = max(1, math.floor(lam / 2) + 1)
    m = (n - 1) // (q + 2) + 1
    return q, m


def kernel_moment(q: int, m: int, lam: float, order: int | None = None) -> float:
    """``gamma_m^{-1} int_0^pi t^lam K(t) sin^3 t dt``."""
    t, w = _weights(q, m, int(order or default_t_order(q, m)))
    return float(np.sum(w * t ** lam) / np.sum(w))
