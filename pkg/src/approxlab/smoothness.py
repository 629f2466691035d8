"""Generalized differences and the generalized modulus of smoothness.

``Delta_t f = T^_t f - f`` and ``Delta_{t_1..t_r} = Delta_{t_r}(Delta_{t_1..t_{r-1}})``.
The modulus ``omega_r(f, delta)_{p,alpha}`` is the supremum of
``||Delta_{t_1..t_r} f||_{p,alpha}`` over ``|t_j| <= delta``.  The operators
depend on ``t`` only through ``cos t``, so the search runs over
``[0, delta]^r``: a uniform grid followed by local refinement rounds that
shrink the box by a factor of four around the incumbent maximizer.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .jacobi import DEFAULT_DEGREE, SpectralFunction, analyze
from .quadrature import QuadratureRule
from .translation import (MAX_DIRECT_ORDER, BackendLimitError, Difference, chebyshev_rule,
                          default_z_order, multipliers)
from .weighted import NormSpec, as_function, batch_norms, sample_points, validate_window

__all__ = ["ModulusReport", "difference", "modulus", "modulus_sweep", "BACKENDS"]

BACKENDS = ("spectral", "direct")
_SHRINK = 4.0


@dataclass
class ModulusReport:
    delta: float
    r: int
    value: float
    argmax_t: tuple
    grid_per_axis: int
    refinement_rounds: int
    backend: str
    evaluations: int = 0
    warnings: list = field(default_factory=list)


def _spectral_multiplier(N, t, variant, z_order):
    return multipliers(N, math.cos(t), variant, z_order).values - 1.0


def difference(f, t_params, backend: str = "spectral", variant: str = "full",
               N: int = DEFAULT_DEGREE, z_rule: QuadratureRule | None = None,
               z_order: int | None = None):
    """Generalized difference of order ``len(t_params)``.

    Spectral: ``c_k -> c_k prod_j (M_k(cos t_j) - 1)``, returning a
    :class:`SpectralFunction` (plain callables are analyzed at degree ``N``).
    Direct: nested quadrature, returning a callable on (-1, 1).
    """
    ts = [float(t) for t in np.atleast_1d(t_params)]
    if not ts:
        raise ValueError("need at least one step parameter")
    if any(abs(t) > math.pi for t in ts):
        raise ValueError("step parameters must satisfy |t| <= pi")
    if backend == "spectral":
        sf = f if isinstance(f, SpectralFunction) else analyze(f, N)
        c = np.array(sf.coeffs)
        for t in ts:
            c = c * _spectral_multiplier(sf.degree, t, variant, z_order)
        return sf.with_coeffs(c)
    if backend == "direct":
        if len(ts) > MAX_DIRECT_ORDER:
            raise BackendLimitError(
                f"direct backend supports order <= {MAX_DIRECT_ORDER}; use the spectral backend")
        z_rule = z_rule or chebyshev_rule(z_order or 64)
        g = as_function(f)
        for t in ts:
            g = Difference(g, math.cos(t), variant, z_rule)
        return g
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")


class _Objective:
    """Memoized ``t -> ||Delta_t f||`` for one function, norm and backend."""

    def __init__(self, f, r, norm, backend, N, z_order):
        self.r = r
        self.norm = norm
        self.backend = backend
        self.x, self.w = sample_points(norm)
        self.values: dict[tuple, float] = {}
        if backend == "spectral":
            self.sf = f if isinstance(f, SpectralFunction) else analyze(f, N)
            self.N = self.sf.degree
            self.z_order = z_order or default_z_order(self.N)
            self.V = self.sf.basis.vandermonde(self.x)
            self._axis_cache: dict[float, np.ndarray] = {}
        elif backend == "direct":
            self.f = as_function(f)
            self.z_rule = chebyshev_rule(z_order or 64)
        else:
            raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")

    def _axis(self, t):
        m = self._axis_cache.get(t)
        if m is None:
            m = self._axis_cache[t] = _spectral_multiplier(self.N, t, "full", self.z_order)
        return m

    def evaluate(self, points):
        todo = [p for p in points if p not in self.values]
        if not todo:
            return
        if self.backend == "spectral":
            C = np.empty((len(todo), self.N + 1))
            for i, p in enumerate(todo):
                c = self.sf.coeffs
                for t in p:
                    c = c * self._axis(t)
                C[i] = c
            norms = batch_norms(C @ self.V.T, self.x, self.w, self.norm)
        else:
            norms = []
            for p in todo:
                g = self.f
                for t in p:
                    g = Difference(g, math.cos(t), "full", self.z_rule)
                norms.append(batch_norms(g(self.x), self.x, self.w, self.norm)[0])
        for p, v in zip(todo, norms):
            self.values[p] = float(v)

    def best(self, delta):
        inside = [(p, v) for p, v in self.values.items() if max(p) <= delta]
        if not inside:
            return None, 0.0
        p, v = min(inside, key=lambda pv: (-pv[1], pv[0]))
        return p, v


def _grid(boxes, g):
    axes = [np.linspace(lo, hi, g) for lo, hi in boxes]
    return [tuple(float(t) for t in pt) for pt in itertools.product(*axes)]


def modulus_sweep(f, deltas, r: int = 1, norm: NormSpec | None = None,
                  grid_per_axis: int = 9, refinement_rounds: int = 2,
                  backend: str = "spectral", N: int = DEFAULT_DEGREE,
                  z_order: int | None = None) -> list[ModulusReport]:
    """Moduli for several ``delta`` sharing one memoized objective.

    Every point evaluated for a smaller ``delta`` stays a candidate for the
    larger ones, which makes the estimates monotone in ``delta``.
    Reports are returned in the order of ``deltas``.
    """
    norm = norm or NormSpec()
    if r < 1:
        raise ValueError("order r must be >= 1")
    if grid_per_axis < 5:
        raise ValueError("grid_per_axis must be at least 5")
    if refinement_rounds < 2:
        raise ValueError("at least two refinement rounds are required")
    deltas = [float(d) for d in deltas]
    for d in deltas:
        if not 0 < d <= math.pi:
            raise ValueError(f"delta must lie in (0, pi], got {d}")
    obj = _Objective(f, r, norm, backend, N, z_order)
    window = validate_window(norm.p, norm.alpha, "inverse")
    reports = {}
    for d in sorted(set(deltas)):
        before = len(obj.values)
        boxes = [(0.0, d)] * r
        obj.evaluate(_grid(boxes, grid_per_axis))
        for _ in range(refinement_rounds):
            center, _ = obj.best(d)
            new = []
            for (lo, hi), c in zip(boxes, center):
                width = (hi - lo) / _SHRINK
                a = min(max(c - width / 2, 0.0), d - width)
                new.append((a, a + width))
            boxes = new
            obj.evaluate(_grid(boxes, grid_per_axis))
        arg, val = obj.best(d)
        rep = ModulusReport(d, r, val, arg, grid_per_axis, refinement_rounds, backend,
                            len(obj.values) - before)
        if not window:
            rep.warnings.append(window.message)
        reports[d] = rep
    return [reports[d] for d in deltas]


def modulus(f, delta: float, r: int = 1, norm: NormSpec | None = None,
            grid_per_axis: int = 9, refinement_rounds: int = 2,
            backend: str = "spectral", N: int = DEFAULT_DEGREE,
            z_order: int | None = None) -> ModulusReport:
    """``omega_r(f, delta)_{p,alpha}`` estimated on a refined grid over ``[0, delta]^r``."""
    return modulus_sweep(f, [delta], r, norm, grid_per_axis, refinement_rounds,
                         backend, N, z_order)[0]
