"""Best weighted polynomial approximation ``E_n(f)_{p,alpha}`` and order fitting.

Polynomials of degree at most ``n - 1`` are represented in the
``P_k^{(2,2)}`` basis.  Solvers:

* ``p = 2``: weighted least squares on the Gauss-Jacobi rule of the norm
  (exponents ``(2 alpha, 2 alpha)``);
* ``1 <= p < inf``: iteratively reweighted least squares (IRLS), with a
  smoothing floor on small residuals and damped steps for ``p > 2``;
* ``p = inf``: Lawson's multiplicative weight iteration on the Chebyshev
  sup-grid, stopped when its lower and upper bounds on ``E_n`` meet.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .jacobi import SpectralFunction, basis22
from .weighted import NormSpec, as_function, batch_norms, sample_points

__all__ = [
    "ApproximationResult",
    "ScalingReport",
    "best_approx",
    "en_sequence",
    "fit_order",
    "fit_loglog",
    "equioscillation",
    "residual_orthogonality",
    "solver_spec",
]

log = logging.getLogger(__name__)

IRLS_TOL = 1e-10
IRLS_MAX_ITER = 200
L1_FLOOR = 1e-10
LAWSON_TOL = 1e-3
LAWSON_ACTIVE = 1e-18
LAWSON_MAX_ITER = 5000
MONOTONE_SLACK = 1e-12


@dataclass
class ApproximationResult:
    n: int
    coeffs: SpectralFunction
    error: float
    method: str
    iterations: int
    converged: bool
    history: list = field(default_factory=list)
    diagnostics: dict = field(default_factory=dict)


@dataclass
class ScalingReport:
    pairs: list
    fitted_slope: float
    fit_range: tuple
    residual: float
    notes: list = field(default_factory=list)


def solver_spec(norm: NormSpec, n: int) -> NormSpec:
    """The discretization actually used to solve and report for degree bound ``n``."""
    if norm.is_sup:
        return norm
    return norm.with_(quad_order=max(norm.quad_order, 4 * n, 128))


class _Problem:
    def __init__(self, f, n, spec):
        if n < 1:
            raise ValueError("degree bound n must be >= 1")
        if n - 1 > 128:
            raise ValueError("degree bound n beyond 129 is not supported")
        self.n = n
        self.spec = spec
        self.x, self.w = sample_points(spec)
        self.fx = np.asarray(f(self.x), dtype=float)
        self.V = basis22(n - 1).vandermonde(self.x)
        if spec.is_sup:
            self.scale = (1 - self.x ** 2) ** spec.alpha
        else:
            self.scale = np.ones_like(self.x)

    def error(self, c):
        return float(batch_norms(self.fx - self.V @ c, self.x, self.w, self.spec)[0])

    def wls(self, weights):
        sw = np.sqrt(weights)
        c, *_ = np.linalg.lstsq(self.V * sw[:, None], self.fx * sw, rcond=None)
        return c


def _project2(prob):
    c = prob.wls(prob.w)
    err = prob.error(c)
    return c, 1, True, [err], {}


def _irls(prob):
    p = prob.spec.p
    floor = L1_FLOOR if p < 2 else 0.0
    c = prob.wls(prob.w)
    err = prob.error(c)
    history = [err]
    step = 1.0 if p <= 2 else 1.0 / (p - 1)
    converged = False
    it = 0
    for it in range(1, IRLS_MAX_ITER + 1):
        res = np.abs(prob.fx - prob.V @ c)
        if p < 2:
            u = prob.w * np.maximum(res, floor) ** (p - 2)
        else:
            u = prob.w * res ** (p - 2)
            if not np.any(u > 0):
                converged = True
                break
        c_ls = prob.wls(u)
        theta = step
        new = c + theta * (c_ls - c)
        new_err = prob.error(new)
        while new_err > err and theta > 1e-6:
            theta *= 0.5
            new = c + theta * (c_ls - c)
            new_err = prob.error(new)
        if new_err > err:
            converged = True
            break
        change = (err - new_err) / err if err > 0 else 0.0
        c, err = new, new_err
        history.append(err)
        if change < IRLS_TOL:
            converged = True
            break
    return c, it, converged, history, {"floor": floor, "step": step}


def _lawson(prob, init_weights=None):
    scale = prob.scale
    m = len(prob.x)
    v = np.full(m, 1.0 / m)
    if init_weights is not None and len(init_weights) == m:
        # keep every point strictly positive so the iteration can still move
        v = 0.5 * v + 0.5 * np.asarray(init_weights) / np.sum(init_weights)
    best_c, best_err, best_v = None, math.inf, v
    lower = 0.0
    history = []
    converged = False
    it = 0
    for it in range(1, LAWSON_MAX_ITER + 1):
        # rows with negligible weight do not change the least-squares solution
        act = v > LAWSON_ACTIVE * v.max()
        sw = np.sqrt(v[act]) * scale[act]
        c, *_ = np.linalg.lstsq(prob.V[act] * sw[:, None], prob.fx[act] * sw, rcond=None)
        e = np.abs(prob.fx - prob.V @ c) * scale
        upper = float(e.max())
        lower = max(lower, math.sqrt(float(np.dot(v, e * e))))
        if upper < best_err:
            best_c, best_err, best_v = c, upper, v
        history.append(upper)
        if best_err == 0 or best_err - lower <= LAWSON_TOL * best_err:
            converged = True
            break
        v = v * e
        total = v.sum()
        if total == 0:
            converged = True
            break
        v /= total
    return best_c, it, converged, history, {"lower_bound": lower, "tol": LAWSON_TOL,
                                            "weights": best_v}


def best_approx(f, n: int, norm: NormSpec | None = None, method: str | None = None,
                init_weights=None) -> ApproximationResult:
    """Best approximation by polynomials of degree at most ``n - 1``.

    ``method`` defaults to ``project2`` for ``p = 2``, ``lawson`` for
    ``p = inf`` and ``irls`` otherwise; non-convergence is reported through
    ``converged`` with the best incumbent, never raised.  ``init_weights``
    warm-starts Lawson from a previous solve on the same grid.
    """
    norm = norm or NormSpec()
    f = as_function(f)
    spec = solver_spec(norm, n)
    prob = _Problem(f, n, spec)
    if method is None:
        method = "lawson" if spec.is_sup else ("project2" if spec.p == 2 else "irls")
    if method == "project2":
        if spec.p != 2:
            raise ValueError("project2 requires p = 2")
        out = _project2(prob)
    elif method == "irls":
        if spec.is_sup:
            raise ValueError("irls requires finite p")
        out = _irls(prob)
    elif method == "lawson":
        if not spec.is_sup:
            raise ValueError("lawson requires p = inf")
        out = _lawson(prob, init_weights)
    else:
        raise ValueError(f"unknown method {method!r}")
    c, iterations, converged, history, diag = out
    err = prob.error(c)
    if not converged:
        log.warning("%s did not converge for n=%d (%s); returning best incumbent",
                    method, n, spec.label())
    return ApproximationResult(n, SpectralFunction(basis22(n - 1), c), err, method,
                               iterations, converged, history, diag)


def en_sequence(f, n_max: int, norm: NormSpec | None = None, window=None) -> ScalingReport:
    """``(n, E_n)`` for ``n = 1..n_max`` on one shared discretization.

    A polynomial of degree ``n - 2`` is also admissible for ``E_n``; if a
    solver returns a worse error than the previous degree, the previous
    polynomial's error is kept, so the sequence is nonincreasing.
    """
    norm = norm or NormSpec()
    f = as_function(f)
    shared = solver_spec(norm, n_max)
    pairs = []
    notes = []
    prev = math.inf
    weights = None
    # Lawson stops once its bounds are within LAWSON_TOL, so smaller excesses are noise
    rel = 2 * LAWSON_TOL if shared.is_sup else 1e-6
    for n in range(1, n_max + 1):
        res = best_approx(f, n, shared, init_weights=weights)
        weights = res.diagnostics.get("weights")
        e = res.error
        if e > prev:
            if e > prev * (1 + rel) + MONOTONE_SLACK:
                notes.append(f"n={n}: solver error {e:.3e} exceeded E_{n - 1}; kept previous")
            e = prev
        if not res.converged:
            notes.append(f"n={n}: {res.method} not converged")
        pairs.append((n, e))
        prev = e
    if any(b[1] > a[1] for a, b in zip(pairs, pairs[1:])):
        raise AssertionError("E_n sequence is not monotone")
    window = window or (1, n_max)
    slope, resid = fit_loglog(pairs, window)
    return ScalingReport(pairs, slope, tuple(window), resid, notes)


def fit_loglog(pairs, window=None, floor: float = 0.0) -> tuple[float, float]:
    """Least-squares slope of ``log value`` against ``log x`` and its rms misfit.

    Only pairs with ``window[0] <= x <= window[1]`` and ``value > floor`` are used;
    with fewer than two usable pairs the slope is ``nan``.
    """
    pts = [(x, v) for x, v in pairs
           if (window is None or window[0] <= x <= window[1]) and v > floor and x > 0]
    if len(pts) < 2:
        return math.nan, math.nan
    lx = np.log([p[0] for p in pts])
    lv = np.log([p[1] for p in pts])
    A = np.column_stack([lx, np.ones_like(lx)])
    coef, *_ = np.linalg.lstsq(A, lv, rcond=None)
    resid = lv - A @ coef
    return float(coef[0]), float(np.sqrt(np.mean(resid ** 2)))


def fit_order(pairs, window=None) -> float:
    """Fitted log-log slope over ``window``."""
    return fit_loglog(pairs, window)[0]


def equioscillation(result: ApproximationResult, f, norm: NormSpec, rel: float = 0.01):
    """Alternating extrema of the weighted error within ``rel`` of ``result.error``.

    Returns ``(count, amplitudes)``.  Runs of same-signed grid points whose
    magnitude is at least ``(1 - rel) * error`` count as one extremum.
    """
    x = np.asarray(sample_points(norm)[0])
    f = as_function(f)
    e = (f(x) - result.coeffs(x)) * (1 - x * x) ** norm.alpha
    E = result.error
    if E == 0:
        return 0, []
    big = np.abs(e) >= (1 - rel) * E
    count, amps = 0, []
    last_sign = 0
    run_max = 0.0
    for i in np.flatnonzero(big):
        s = 1 if e[i] > 0 else -1
        if s != last_sign:
            if last_sign:
                amps.append(run_max)
            count += 1
            last_sign = s
            run_max = abs(e[i])
        else:
            run_max = max(run_max, abs(e[i]))
    if last_sign:
        amps.append(run_max)
    return count, amps


def residual_orthogonality(result: ApproximationResult, f, norm: NormSpec) -> float:
    """``max_k |<f - P, P_k>_w|`` over ``k < n`` on the solver rule (``p = 2``)."""
    spec = solver_spec(norm, result.n)
    x, w = sample_points(spec)
    f = as_function(f)
    r = f(x) - result.coeffs(x)
    V = basis22(result.n - 1).vandermonde(x)
    return float(np.max(np.abs((w * r) @ V)))
