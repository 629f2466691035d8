"""Asymmetric generalized translation ``T_y`` and the auxiliary operators.

Direct form (``y = cos t``, ``z = cos phi``)::

    T_y f(x) = 1/(pi (1-x^2)) int_{-1}^{1} K(x, y, z) f(R) dz / sqrt(1 - z^2)
    R = x y - z sqrt(1-x^2) sqrt(1-y^2)

with ``K = 1 - R^2 - 2(1-y^2)(1-z^2) + 4(1-x^2)(1-y^2)(1-z^2)^2`` for the full
operator, the same bracket without the last term for ``aux1``, and
``8/(3 pi) (1-z^2)^2`` (no ``1/(1-x^2)`` factor) for ``aux2``.  The
``dz / sqrt(1 - z^2)`` integral is a Gauss-Chebyshev sum.

Each operator is diagonal in the ``P_k^{(2,2)}`` basis; the eigenvalues are
extracted by projection into :class:`MultiplierTable` objects and drive the
spectral backend.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .jacobi import SpectralFunction, basis22
from .quadrature import QuadratureRule, gauss_rule
from .weighted import Function, as_function

__all__ = [
    "VARIANTS",
    "BackendLimitError",
    "MultiplierTable",
    "kernel_weight",
    "orbit",
    "chebyshev_rule",
    "default_z_order",
    "translate_direct",
    "translate_hat",
    "iterated_direct",
    "multipliers",
    "multiplier_table",
    "translate_spectral",
    "Translated",
]

VARIANTS = ("full", "aux1", "aux2")
MIN_Z_ORDER = 64
MAX_DIRECT_ORDER = 3
_CHUNK = 1 << 18


class BackendLimitError(ValueError):
    """The direct backend does not support the requested order."""


def _check_variant(variant: str) -> None:
    if variant not in VARIANTS:
        raise ValueError(f"unknown variant {variant!r}; expected one of {VARIANTS}")


def _check_open(x) -> None:
    if np.any(np.abs(x) >= 1):
        raise ValueError("translation operators are singular at x = +-1; "
                         "evaluate on the open interval")


def chebyshev_rule(n: int = MIN_Z_ORDER) -> QuadratureRule:
    return gauss_rule(-0.5, -0.5, n)


def default_z_order(N: int) -> int:
    """Chebyshev rule length that integrates degree-``N`` polynomial inputs exactly."""
    return max(MIN_Z_ORDER, N // 2 + 8)


def orbit(x, y, z):
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    return x * y - z * np.sqrt(1 - x * x) * np.sqrt(np.clip(1 - y * y, 0.0, None))


def _kernel(variant, x, y, z, R):
    if variant == "aux2":
        return np.broadcast_to(8.0 / (3 * np.pi) * (1 - z * z) ** 2, np.broadcast_shapes(
            np.shape(x), np.shape(z)))
    omx = 1 - x * x
    omy = 1 - y * y
    omz = 1 - z * z
    bracket = 1 - R * R - 2 * omy * omz
    if variant == "full":
        bracket = bracket + 4 * omx * omy * omz * omz
    return bracket / (np.pi * omx)


def kernel_weight(variant: str, x, y, z):
    """Kernel value including the variant prefactor, for ``|x| < 1``."""
    _check_variant(variant)
    x, y, z = (np.asarray(v, dtype=float) for v in (x, y, z))
    _check_open(x)
    out = _kernel(variant, x, y, z, orbit(x, y, z))
    return out if np.ndim(out) else float(out)


class Translated(Function):
    """``x -> T_{y}(f, x)`` by Gauss-Chebyshev quadrature in ``z``."""

    def __init__(self, f, y: float, variant: str = "full", z_rule: QuadratureRule | None = None):
        _check_variant(variant)
        if not -1 <= y <= 1:
            raise ValueError(f"|y| must not exceed 1, got {y}")
        self.f = as_function(f)
        self.y = float(y)
        self.variant = variant
        self.z_rule = z_rule or chebyshev_rule()
        inner = getattr(self.f, "depth", 0)
        self.depth = inner + 1
        super().__init__(self._apply, f"T[{variant},{self.y:g}]({getattr(self.f, 'name', 'f')})")

    def _apply(self, x):
        _check_open(x)
        shape = x.shape
        flat = x.reshape(-1)
        z, wz = self.z_rule.nodes, self.z_rule.weights
        out = np.empty(flat.shape)
        step = max(1, _CHUNK // len(z))
        for lo in range(0, flat.size, step):
            X = flat[lo: lo + step, None]
            R = orbit(X, self.y, z)
            K = _kernel(self.variant, X, self.y, z, R)
            out[lo: lo + step] = (K * self.f(R)) @ wz
        return out.reshape(shape)


class Difference(Function):
    """``x -> T_y(h, x) - h(x)``."""

    def __init__(self, f, y: float, variant: str = "full", z_rule: QuadratureRule | None = None):
        self.inner = as_function(f)
        self.T = Translated(self.inner, y, variant, z_rule)
        self.depth = self.T.depth
        super().__init__(lambda x: self.T(x) - self.inner(x), f"D[{self.T.y:g}]")


def translate_direct(f, y: float, variant: str = "full", z_rule: QuadratureRule | None = None):
    if z_rule is not None and z_rule.weight_exponents != (-0.5, -0.5):
        raise ValueError("direct translation needs a Chebyshev (-1/2, -1/2) rule")
    return Translated(f, y, variant, z_rule)


def translate_hat(f, t: float, variant: str = "full", n_phi: int = MIN_Z_ORDER):
    """The angular form ``T^_t`` integrated over ``phi`` in [0, pi] by the midpoint rule.

    Uses the signed ``sin t``, so evaluating at ``t`` and ``-t`` exercises
    the evenness of the operator rather than assuming it.
    """
    _check_variant(variant)
    f = as_function(f)
    phi = (np.arange(n_phi) + 0.5) * np.pi / n_phi
    w = np.full(n_phi, np.pi / n_phi)
    ct, st = math.cos(t), math.sin(t)
    cphi, sphi2 = np.cos(phi), np.sin(phi) ** 2

    def apply(x):
        x = np.asarray(x, dtype=float)
        _check_open(x)
        X = x[..., None]
        omx = 1 - X * X
        R = X * ct - np.sqrt(omx) * st * cphi
        if variant == "aux2":
            K = np.broadcast_to(8.0 / (3 * np.pi) * sphi2 ** 2, R.shape)
        else:
            bracket = 1 - R * R - 2 * st * st * sphi2
            if variant == "full":
                bracket = bracket + 4 * omx * st * st * sphi2 ** 2
            K = bracket / (np.pi * omx)
        return (K * f(R)) @ w

    return Function(apply, f"That[{variant},{t:g}]")


def iterated_direct(f, ys, variant: str = "full", z_rule: QuadratureRule | None = None):
    """``T_{y_r}(... T_{y_1}(f))``: the first parameter is applied innermost."""
    ys = list(ys)
    if not ys:
        raise ValueError("need at least one translation parameter")
    if len(ys) > MAX_DIRECT_ORDER:
        raise BackendLimitError(
            f"direct backend supports order <= {MAX_DIRECT_ORDER} (got {len(ys)}); "
            "use the spectral backend for higher orders")
    g = as_function(f)
    for y in ys:
        g = translate_direct(g, y, variant, z_rule)
    return g


@dataclass(frozen=True, eq=False)
class MultiplierTable:
    """Eigenvalues of the three operators on ``P_0..P_N`` at a fixed ``y``.

    ``full[k] = R_k(y)``, ``aux1[k]`` is the ``T_{1;y}`` eigenvalue and
    ``aux2[k]`` the ``T_{2;y}`` eigenvalue (which equals ``P_k(y)``).
    ``variant`` selects which of them :attr:`values` exposes.
    """

    y: float
    full: np.ndarray
    aux1: np.ndarray
    aux2: np.ndarray
    variant: str = "full"
    z_order: int = MIN_Z_ORDER

    @property
    def values(self) -> np.ndarray:
        return getattr(self, self.variant)

    @property
    def degree(self) -> int:
        return len(self.full) - 1

    @property
    def bound(self) -> float:
        """Largest multiplier magnitude in the selected table."""
        return float(np.max(np.abs(self.values)))

    def select(self, variant: str) -> "MultiplierTable":
        _check_variant(variant)
        return MultiplierTable(self.y, self.full, self.aux1, self.aux2, variant, self.z_order)


@lru_cache(maxsize=16384)
def _table(N: int, y: float, z_order: int) -> MultiplierTable:
    basis = basis22(N)
    xr = gauss_rule(2, 2, N + 8)
    zr = chebyshev_rule(z_order)
    X = xr.nodes[:, None]
    Z = zr.nodes[None, :]
    R = orbit(X, y, Z)
    VR = basis.vandermonde(R)  # (nx, nz, N+1)
    Vx = basis.vandermonde(xr.nodes)  # (nx, N+1)
    proj = (xr.weights[:, None] * Vx) / basis.norm_sq  # (nx, N+1)
    out = {}
    for variant in VARIANTS:
        K = _kernel(variant, X, y, Z, R) * zr.weights
        TV = np.einsum("ji,jik->jk", K, VR)
        vals = np.einsum("jk,jk->k", proj, TV)
        vals.setflags(write=False)
        out[variant] = vals
    return MultiplierTable(float(y), out["full"], out["aux1"], out["aux2"], "full", z_order)


def multiplier_table(N: int, y: float, z_order: int | None = None) -> MultiplierTable:
    if not -1 <= y <= 1:
        raise ValueError(f"|y| must not exceed 1, got {y}")
    return _table(int(N), float(y), int(z_order or default_z_order(N)))


def multipliers(N: int, y: float, variant: str = "full", z_order: int | None = None) -> MultiplierTable:
    """Eigenvalues ``<T P_k, P_k>_{(2,2)} / h_k`` for ``k = 0..N``."""
    _check_variant(variant)
    return multiplier_table(N, y, z_order).select(variant)


def translate_spectral(sf: SpectralFunction, ys, variant: str = "full", tables=None,
                       z_order: int | None = None) -> SpectralFunction:
    """Multiply ``c_k`` by ``prod_j M_k(y_j)`` for the chosen variant."""
    _check_variant(variant)
    ys = list(np.atleast_1d(ys))
    if tables is None:
        tables = [multipliers(sf.degree, y, variant, z_order) for y in ys]
    c = np.array(sf.coeffs)
    for tab in tables:
        vals = tab.values if isinstance(tab, MultiplierTable) else np.asarray(tab)
        if len(vals) != len(c):
            raise IndexError(f"multiplier table has degree {len(vals) - 1}, "
                             f"function has degree {len(c) - 1}")
        c = c * vals
    return sf.with_coeffs(c)
