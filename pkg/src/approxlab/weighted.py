"""Weighted ``L_{p,alpha}`` norms on (-1, 1) and the theorem parameter windows.

``||f||_{p,alpha} = || f(x) (1 - x^2)^alpha ||_p``.  For finite ``p`` the
integral is a Gauss-Jacobi sum with exponents ``(p*alpha, p*alpha)``; for
``p = inf`` the supremum is taken over Chebyshev points of the first kind,
which never touch the endpoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

import numpy as np

from .quadrature import gauss_rule

__all__ = [
    "NormSpec",
    "Function",
    "WindowCheck",
    "as_function",
    "chebyshev_grid",
    "weighted_norm",
    "weighted_values",
    "validate_window",
    "parse_p",
]

DEFAULT_QUAD_ORDER = 192
DEFAULT_SUP_GRID = 4097


def parse_p(p) -> float:
    if isinstance(p, str):
        if p.strip().lower() in ("inf", "infinity", "oo"):
            return math.inf
        return float(p)
    return float(p)


@dataclass(frozen=True)
class NormSpec:
    """Parameters of ``||.||_{p,alpha}`` and its discretization."""

    p: float = 2.0
    alpha: float = 0.0
    quad_order: int = DEFAULT_QUAD_ORDER
    sup_grid: int = DEFAULT_SUP_GRID

    def __post_init__(self):
        object.__setattr__(self, "p", parse_p(self.p))
        if not self.p >= 1:
            raise ValueError(f"p must be >= 1, got {self.p}")
        if self.quad_order < 32:
            raise ValueError("quad_order must be at least 32")
        if self.sup_grid < 257:
            raise ValueError("sup_grid must be at least 257")
        if not self.is_sup and self.p * self.alpha <= -1:
            raise ValueError(
                f"weight (1-x^2)^{self.p * self.alpha:g} is not integrable (p*alpha <= -1)")

    @property
    def is_sup(self) -> bool:
        return math.isinf(self.p)

    def with_(self, **kw) -> "NormSpec":
        return replace(self, **kw)

    def label(self) -> str:
        p = "inf" if self.is_sup else f"{self.p:g}"
        return f"p={p}, alpha={self.alpha:g}"


class Function:
    """A named, vectorized evaluator on the open interval (-1, 1)."""

    def __init__(self, fn: Callable, name: str = "f"):
        self._fn = fn
        self.name = name

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.broadcast_to(np.asarray(self._fn(x), dtype=float), x.shape).copy()

    def __repr__(self):
        return f"Function({self.name})"


def as_function(f, name: str | None = None):
    """Wrap a plain callable; spectral functions and wrapped ones pass through."""
    from .jacobi import SpectralFunction

    if isinstance(f, (Function, SpectralFunction)):
        return f
    if not callable(f):
        raise TypeError(f"expected a callable, got {type(f).__name__}")
    return Function(f, name or getattr(f, "__name__", "f"))


@lru_cache(maxsize=16)
def chebyshev_grid(m: int) -> np.ndarray:
    """``cos((2i - 1) pi / (2m))`` sorted ascending; open on both ends."""
    i = np.arange(m, 0, -1)
    x = np.cos((2 * i - 1) * np.pi / (2 * m))
    x = 0.5 * (x - x[::-1])
    x.setflags(write=False)
    return x


def _sample_points(spec: NormSpec):
    if spec.is_sup:
        x = chebyshev_grid(spec.sup_grid)
        return x, None
    a = spec.p * spec.alpha
    rule = gauss_rule(a, a, spec.quad_order)
    return rule.nodes, rule.weights


def weighted_values(f, spec: NormSpec):
    """Sample points, quadrature weights (``None`` for sup) and values of ``f``."""
    x, w = _sample_points(spec)
    return x, w, np.broadcast_to(np.asarray(f(x), dtype=float), x.shape)


def _norm_from_values(x, w, vals, spec: NormSpec) -> float:
    if spec.is_sup:
        return float(np.max(np.abs(vals) * (1 - x * x) ** spec.alpha))
    p = spec.p
    if p == 2:
        return math.sqrt(float(np.dot(w, vals * vals)))
    if p == 1:
        return float(np.dot(w, np.abs(vals)))
    return float(np.dot(w, np.abs(vals) ** p)) ** (1.0 / p)


def weighted_norm(f, spec: NormSpec) -> float:
    """``||f||_{p,alpha}`` computed on the grid or rule described by ``spec``."""
    x, w, vals = weighted_values(f, spec)
    return _norm_from_values(x, w, vals, spec)


@dataclass(frozen=True)
class WindowCheck:
    ok: bool
    message: str

    def __bool__(self):
        return self.ok


def validate_window(p, alpha: float, theorem: str) -> WindowCheck:
    """Check ``(p, alpha)`` against the hypotheses of the direct or inverse theorems.

    direct:  ``alpha <= 2`` if ``p = 1``, ``alpha < 3 - 1/p`` if ``1 < p <= inf``.
    inverse: ``1/2 < alpha <= 1`` if ``p = 1``,
             ``1 - 1/(2p) < alpha < 3/2 - 1/(2p)`` if ``1 < p < inf``,
             ``1 <= alpha < 3/2`` if ``p = inf``.
    """
    p = parse_p(p)
    if not p >= 1:
        raise ValueError("p must be >= 1")
    ps = "inf" if math.isinf(p) else f"{p:g}"
    if theorem == "direct":
        if p == 1:
            ok, desc = alpha <= 2, "alpha <= 2"
        else:
            hi = 3 - (0.0 if math.isinf(p) else 1 / p)
            ok, desc = alpha < hi, f"alpha < {hi:g}"
    elif theorem == "inverse":
        if p == 1:
            ok, desc = 0.5 < alpha <= 1, "1/2 < alpha <= 1"
        elif math.isinf(p):
            ok, desc = 1 <= alpha < 1.5, "1 <= alpha < 3/2"
        else:
            lo, hi = 1 - 1 / (2 * p), 1.5 - 1 / (2 * p)
            ok, desc = lo < alpha < hi, f"{lo:g} < alpha < {hi:g}"
    else:
        raise ValueError(f"unknown theorem tag {theorem!r}; use 'direct' or 'inverse'")
    verdict = "inside" if ok else "outside"
    return WindowCheck(bool(ok), f"(p={ps}, alpha={alpha:g}) {verdict} {theorem} window: {desc}")


def batch_norms(values: np.ndarray, x, w, spec: NormSpec) -> np.ndarray:
    """Row-wise norms of ``values`` sampled at the points of ``spec``."""
    values = np.atleast_2d(values)
    if spec.is_sup:
        return np.max(np.abs(values) * (1 - x * x) ** spec.alpha, axis=-1)
    p = spec.p
    if p == 2:
        return np.sqrt((values * values) @ w)
    if p == 1:
        return np.abs(values) @ w
    return (np.abs(values) ** p @ w) ** (1.0 / p)


def sample_points(spec: NormSpec):
    """``(x, w)`` for the rule or grid behind ``spec`` (``w`` is ``None`` for sup)."""
    return _sample_points(spec)
