"""Gauss-Jacobi quadrature rules.

Nodes and weights come from the Golub-Welsch construction: the nodes are the
eigenvalues of the symmetric tridiagonal Jacobi matrix built from the monic
three-term recurrence, and the weights are the total mass times the squared
first components of the normalized eigenvectors.  The eigenproblem is solved
with an implicit-shift QL iteration that only tracks the first row of the
eigenvector matrix.

Rules are cached in memory per exact ``(a, b, n)``.  When the environment
variable ``APPROXLAB_CACHE_DIR`` is set, rules are also persisted there as
small binary files (see :func:`save_rule` / :func:`load_rule`).
"""

from __future__ import annotations

import math
import os
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureRule",
    "EigenSolverError",
    "recurrence_coeffs",
    "tridiagonal_eigen",
    "gauss_rule",
    "integrate",
    "weight_mass",
    "save_rule",
    "load_rule",
]

CACHE_ENV = "APPROXLAB_CACHE_DIR"
_CACHE_MAGIC = b"APXQRULE"
_CACHE_VERSION = 1
_MAX_QL_ITER = 60


class EigenSolverError(RuntimeError):
    """Raised when the QL iteration fails to deflate an eigenvalue."""


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss rule for the weight ``(1 - x)**a * (1 + x)**b`` on (-1, 1)."""

    weight_exponents: tuple[float, float]
    nodes: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        self.nodes.setflags(write=False)
        self.weights.setflags(write=False)

    @property
    def order(self) -> int:
        return len(self.nodes)

    def __repr__(self):
        a, b = self.weight_exponents
        return f"QuadratureRule(a={a:g}, b={b:g}, n={self.order})"


def _check_exponents(a: float, b: float) -> None:
    if not (a > -1 and b > -1):
        raise ValueError(f"Jacobi exponents must exceed -1, got a={a}, b={b}")


def weight_mass(a: float, b: float) -> float:
    """Integral of ``(1 - x)**a (1 + x)**b`` over [-1, 1]."""
    _check_exponents(a, b)
    return math.exp((a + b + 1) * math.log(2.0) + math.lgamma(a + 1)
                    + math.lgamma(b + 1) - math.lgamma(a + b + 2))


def recurrence_coeffs(a: float, b: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Symmetric (Jacobi matrix) recurrence coefficients.

    Returns ``(diag, offdiag)`` with ``len(diag) == n`` and
    ``len(offdiag) == n - 1``; ``offdiag[k-1] = sqrt(beta_k)`` where
    ``beta_k`` is the monic recurrence coefficient.
    """
    _check_exponents(a, b)
    if n < 1:
        raise ValueError("n must be at least 1")
    ab = a + b
    k = np.arange(n, dtype=float)
    diag = np.empty(n)
    diag[0] = (b - a) / (ab + 2)
    if n > 1:
        kk = k[1:]
        diag[1:] = (b * b - a * a) / ((2 * kk + ab) * (2 * kk + ab + 2))
    off = np.empty(n - 1)
    if n > 1:
        # k = 1 written with the (a + b + 1) factor cancelled, valid at a + b = -1
        off[0] = 4 * (1 + a) * (1 + b) / ((2 + ab) ** 2 * (3 + ab))
        if n > 2:
            kk = k[2:]
            s = 2 * kk + ab
            off[1:] = 4 * kk * (kk + a) * (kk + b) * (kk + ab) / (s * s * (s + 1) * (s - 1))
        off = np.sqrt(off)
    return diag, off


def tridiagonal_eigen(diag, offdiag) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and first eigenvector components of a symmetric tridiagonal matrix.

    Implicit-shift QL with Wilkinson-type shifts.  Returns eigenvalues in
    ascending order together with the matching first components of the
    orthonormal eigenvectors.
    """
    d = np.array(diag, dtype=float).tolist()
    n = len(d)
    e = np.array(offdiag, dtype=float).tolist() + [0.0]
    z = [0.0] * n
    z[0] = 1.0
    eps = np.finfo(float).eps

    for l in range(n):
        it = 0
        while True:
            m = l
            while m < n - 1:
                if abs(e[m]) <= eps * (abs(d[m]) + abs(d[m + 1])):
                    break
                m += 1
            if m == l:
                break
            if it == _MAX_QL_ITER:
                raise EigenSolverError(
                    f"QL iteration did not converge for eigenvalue {l} of {n} "
                    f"after {it} sweeps (|e|={abs(e[l]):.3e}, d={d[l]:.17g})")
            it += 1
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            i = m - 1
            while i >= l:
                f = s * e[i]
                bb = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    # underflow: deflate and restart this eigenvalue
                    d[i + 1] -= p
                    e[m] = 0.0
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * bb
                p = s * r
                d[i + 1] = g + p
                g = c * r - bb
                zf = z[i + 1]
                z[i + 1] = s * z[i] + c * zf
                z[i] = c * z[i] - s * zf
                i -= 1
            else:
                d[l] -= p
                e[l] = g
                e[m] = 0.0

    vals = np.array(d)
    first = np.array(z)
    order = np.argsort(vals, kind="stable")
    return vals[order], first[order]


_cache: dict[tuple[float, float, int], QuadratureRule] = {}
_cache_lock = threading.Lock()


def _cache_path(a: float, b: float, n: int) -> Path | None:
    root = os.environ.get(CACHE_ENV)
    if not root:
        return None
    return Path(root) / f"gauss_{a!r}_{b!r}_{n}.qr"


def save_rule(rule: QuadratureRule, path) -> None:
    """Write a rule as ``magic | version | n | a | b | nodes | weights`` (little endian)."""
    a, b = rule.weight_exponents
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<IIdd", _CACHE_VERSION, rule.order, a, b))
        fh.write(np.ascontiguousarray(rule.nodes, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(rule.weights, dtype="<f8").tobytes())
    os.replace(tmp, path)


def load_rule(path) -> QuadratureRule:
    data = Path(path).read_bytes()
    head = len(_CACHE_MAGIC)
    if data[:head] != _CACHE_MAGIC:
        raise ValueError(f"{path}: not a quadrature rule file")
    version, n, a, b = struct.unpack_from("<IIdd", data, head)
    if version != _CACHE_VERSION:
        raise ValueError(f"{path}: unsupported rule file version {version}")
    off = head + struct.calcsize("<IIdd")
    arr = np.frombuffer(data, dtype="<f8", offset=off)
    if arr.size != 2 * n:
        raise ValueError(f"{path}: truncated rule file")
    return QuadratureRule((a, b), arr[:n].astype(float), arr[n:].astype(float))


def _build_rule(a: float, b: float, n: int) -> QuadratureRule:
    diag, off = recurrence_coeffs(a, b, n)
    nodes, first = tridiagonal_eigen(diag, off)
    if a == b:
        # the weight is even: symmetrize away rounding asymmetry
        nodes = 0.5 * (nodes - nodes[::-1])
        first = np.sqrt(0.5 * (first ** 2 + first[::-1] ** 2))
    weights = weight_mass(a, b) * first ** 2
    return QuadratureRule((float(a), float(b)), nodes, weights)


def gauss_rule(a: float, b: float, n: int) -> QuadratureRule:
    """Return the cached ``n``-point Gauss rule for ``(1 - x)**a (1 + x)**b``."""
    _check_exponents(a, b)
    n = int(n)
    if n < 1:
        raise ValueError("n must be at least 1")
    key = (float(a), float(b), n)
    rule = _cache.get(key)
    if rule is not None:
        return rule
    path = _cache_path(*key)
    if path is not None and path.exists():
        try:
            rule = load_rule(path)
        except (OSError, ValueError):
            rule = None
    if rule is None:
        rule = _build_rule(*key)
        if path is not None:
            try:
                save_rule(rule, path)
            except OSError:
                pass
    with _cache_lock:
        return _cache.setdefault(key, rule)


def integrate(rule: QuadratureRule, g: Callable) -> float:
    """``sum(weights * g(nodes))``; ``g`` must accept an array of nodes."""
    vals = np.asarray(g(rule.nodes), dtype=float)
    if vals.shape == ():
        vals = np.full(rule.order, float(vals))
    return float(np.dot(rule.weights, vals))
