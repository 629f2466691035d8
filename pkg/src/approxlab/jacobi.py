"""Jacobi polynomials normalized by ``P_k(1) = 1`` and Fourier-Jacobi analysis.

The spectral representation used throughout the package is the
``(2, 2)`` basis: a :class:`SpectralFunction` stores ``c_k = a_k / h_k``
where ``a_k = int f P_k (1 - x^2)^2 dx`` and ``h_k`` is the squared norm of
the normalized polynomial, so that ``f(x) = sum_k c_k P_k(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .quadrature import QuadratureRule, gauss_rule

__all__ = [
    "JacobiBasis",
    "SpectralFunction",
    "basis22",
    "eval_basis",
    "eval_deriv",
    "norm_sq",
    "analyze",
    "synthesize",
    "MAX_DEGREE",
    "DEFAULT_DEGREE",
]

MAX_DEGREE = 128
DEFAULT_DEGREE = 64


def _jacobi_table(a: float, b: float, nmax: int, x: np.ndarray) -> np.ndarray:
    """Standard-normalization values ``P_k^{(a,b)}(x)``, shape ``x.shape + (nmax+1,)``."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (nmax + 1,))
    out[..., 0] = 1.0
    if nmax == 0:
        return out
    ab = a + b
    out[..., 1] = (a + 1) + (ab + 2) * (x - 1) / 2
    for k in range(2, nmax + 1):
        s = 2 * k + ab
        c0 = 2 * k * (k + ab) * (s - 2)
        c1 = (s - 1) * (s * (s - 2) * x + a * a - b * b)
        c2 = 2 * (k + a - 1) * (k + b - 1) * s
        out[..., k] = (c1 * out[..., k - 1] - c2 * out[..., k - 2]) / c0
    return out


@dataclass(frozen=True)
class JacobiBasis:
    """Normalized Jacobi polynomials ``P_0..P_N`` for weight ``(1-x)^a (1+x)^b``."""

    exponents: tuple[float, float]
    max_degree: int

    def __post_init__(self):
        a, b = self.exponents
        if not (a > -1 and b > -1):
            raise ValueError(f"Jacobi exponents must exceed -1, got {self.exponents}")
        if not 0 <= self.max_degree <= MAX_DEGREE:
            raise ValueError(f"max_degree must lie in [0, {MAX_DEGREE}]")

    @cached_property
    def _at_one(self) -> np.ndarray:
        a, b = self.exponents
        # the recurrence's own value at 1, so that P_k(1) == 1 exactly
        return _jacobi_table(a, b, self.max_degree, np.array(1.0))

    @cached_property
    def norm_sq(self) -> np.ndarray:
        """``h_k = int P_k^2 (1-x)^a (1+x)^b dx`` for the value-one-at-one normalization."""
        a, b = self.exponents
        h = np.empty(self.max_degree + 1)
        for k in range(self.max_degree + 1):
            logh = (a + b + 1) * math.log(2.0) - math.log(2 * k + a + b + 1) \
                + math.lgamma(k + a + 1) + math.lgamma(k + b + 1) \
                - math.lgamma(k + a + b + 1) - math.lgamma(k + 1) \
                if k > 0 else \
                (a + b + 1) * math.log(2.0) + math.lgamma(a + 1) + math.lgamma(b + 1) \
                - math.lgamma(a + b + 2)
            h[k] = math.exp(logh)
        h /= self._at_one ** 2
        h.setflags(write=False)
        return h

    def vandermonde(self, x, degree: int | None = None) -> np.ndarray:
        """Values ``P_k(x)`` for ``k = 0..degree``; shape ``x.shape + (degree+1,)``."""
        deg = self.max_degree if degree is None else degree
        self._check_degree(deg)
        a, b = self.exponents
        return _jacobi_table(a, b, deg, x) / self._at_one[: deg + 1]

    def deriv_vandermonde(self, x, degree: int | None = None) -> np.ndarray:
        """Derivatives ``P_k'(x)`` via ``d/dx P_k^{(a,b)} = (k+a+b+1)/2 P_{k-1}^{(a+1,b+1)}``."""
        deg = self.max_degree if degree is None else degree
        self._check_degree(deg)
        a, b = self.exponents
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape + (deg + 1,))
        if deg >= 1:
            k = np.arange(1, deg + 1)
            shifted = _jacobi_table(a + 1, b + 1, deg - 1, x)
            out[..., 1:] = shifted * ((k + a + b + 1) / 2) / self._at_one[1: deg + 1]
        return out

    def _check_degree(self, k):
        if np.any(np.asarray(k) > self.max_degree) or np.any(np.asarray(k) < 0):
            raise IndexError(f"degree {k} outside basis range 0..{self.max_degree}")


def basis22(max_degree: int = DEFAULT_DEGREE) -> JacobiBasis:
    return _basis22(int(max_degree))


_basis_cache: dict[int, JacobiBasis] = {}


def _basis22(n: int) -> JacobiBasis:
    b = _basis_cache.get(n)
    if b is None:
        b = _basis_cache.setdefault(n, JacobiBasis((2.0, 2.0), n))
    return b


def eval_basis(basis: JacobiBasis, k: int, x):
    basis._check_degree(k)
    vals = basis.vandermonde(x, degree=k)[..., k]
    return vals if np.ndim(vals) else float(vals)


def eval_deriv(basis: JacobiBasis, k: int, x):
    basis._check_degree(k)
    vals = basis.deriv_vandermonde(x, degree=k)[..., k]
    return vals if np.ndim(vals) else float(vals)


def norm_sq(basis: JacobiBasis, k: int) -> float:
    basis._check_degree(k)
    return float(basis.norm_sq[k])


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """``f(x) = sum_k coeffs[k] * P_k^{(2,2)}(x)`` with ``P_k(1) = 1``."""

    basis: JacobiBasis
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=float)
        if c.ndim != 1 or len(c) != self.basis.max_degree + 1:
            raise ValueError(
                f"expected {self.basis.max_degree + 1} coefficients, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return self.basis.max_degree

    def __call__(self, x):
        return synthesize(self, x)

    def with_coeffs(self, coeffs) -> "SpectralFunction":
        return SpectralFunction(self.basis, coeffs)

    def raw_coeffs(self) -> np.ndarray:
        """Unnormalized Fourier-Jacobi coefficients ``a_k = c_k h_k``."""
        return self.coeffs * self.basis.norm_sq

    @classmethod
    def from_coeffs(cls, coeffs) -> "SpectralFunction":
        coeffs = np.asarray(coeffs, dtype=float)
        return cls(basis22(len(coeffs) - 1), coeffs)


def analyze(f, N: int = DEFAULT_DEGREE, rule: QuadratureRule | None = None) -> SpectralFunction:
    """Fourier-Jacobi coefficients of ``f`` in the ``(2, 2)`` basis up to degree ``N``."""
    if rule is None:
        rule = gauss_rule(2, 2, N + 8)
    if rule.weight_exponents != (2.0, 2.0):
        raise ValueError("analysis needs a (2, 2) Gauss-Jacobi rule")
    if rule.order < N + 8:
        raise ValueError(f"rule order {rule.order} below required N + 8 = {N + 8}")
    basis = basis22(N)
    vals = np.asarray(f(rule.nodes), dtype=float)
    if vals.shape == ():
        vals = np.full(rule.order, float(vals))
    V = basis.vandermonde(rule.nodes)
    a = (rule.weights * vals) @ V
    return SpectralFunction(basis, a / basis.norm_sq)


def synthesize(sf: SpectralFunction, x):
    vals = sf.basis.vandermonde(x) @ sf.coeffs
    return vals if np.ndim(vals) else float(vals)
