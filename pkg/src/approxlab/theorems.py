"""Experiments measuring the direct, inverse and coincidence statements.

Each experiment produces an :class:`ExperimentReport` whose verdict is a
pure function of its ``series``, ``tolerances`` and ``inputs``;
:func:`recompute_verdict` re-derives it from a serialized report.

Theorem constants are never asserted as numbers.  The checks are ratio
stability (``max C_n / min C_n`` bounded) and fitted log-log slopes.
"""

from __future__ import annotations

import math
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .best_approx import en_sequence, fit_loglog
from .checks import DEFAULT_FAMILY, run_checks
from .jacobi import basis22
from .registry import make_function
from .smoothness import modulus_sweep
from .weighted import NormSpec, as_function, batch_norms, parse_p, sample_points, validate_window

__all__ = [
    "ExperimentReport",
    "VerifyConfig",
    "ExperimentSettings",
    "compute_series",
    "direct_experiment",
    "inverse_experiment",
    "equivalence_experiment",
    "bernstein_markov_check",
    "verify_suite",
    "theorem_experiments",
    "rhs_series",
    "report_label",
    "recompute_verdict",
    "report_from_dict",
    "bm_ratios",
]

FLOOR = 1e-13


@dataclass
class ExperimentReport:
    experiment: str
    inputs: dict
    series: dict
    empirical_constants: dict = field(default_factory=dict)
    slopes: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    verdict: bool = False
    applicable: bool = True
    checks: dict = field(default_factory=dict)
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return _jsonable(asdict(self))


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, float) and math.isinf(obj):
        return "inf" if obj > 0 else "-inf"
    return obj


def report_from_dict(d: dict) -> ExperimentReport:
    return ExperimentReport(**d)


@dataclass(frozen=True)
class ExperimentSettings:
    """Discretization used by the theorem experiments.

    Kinks and cusps need a finer x rule than the library default: with 192
    points the node spacing near 0 is comparable to ``delta = 1/48``.
    The modulus uses direct z-quadrature for ``r = 1``: spectral truncation
    at degree 128 biases it for non-smooth ``f``.
    """

    quad_order: int = 1024
    sup_grid: int = 4097
    z_order_finite: int = 512
    z_order_sup: int = 256
    spectral_N: int = 128

    def norm(self, p, alpha) -> NormSpec:
        return NormSpec(p, alpha, quad_order=self.quad_order, sup_grid=self.sup_grid)

    def modulus_kwargs(self, norm: NormSpec, r: int) -> dict:
        if r == 1:
            z = self.z_order_sup if norm.is_sup else self.z_order_finite
            return {"backend": "direct", "z_order": z}
        return {"backend": "spectral", "N": self.spectral_N}


def _floats(seq):
    return [float(v) for v in seq]


def compute_series(f, p, alpha, r, n_range, settings: ExperimentSettings | None = None) -> dict:
    """``E_nu`` for ``nu = 1..n_max`` and ``omega_r(f, 1/n)`` over ``n_range``."""
    settings = settings or ExperimentSettings()
    f = as_function(f)
    lo, hi = n_range
    norm = settings.norm(p, alpha)
    en = en_sequence(f, hi, norm)
    ns = list(range(lo, hi + 1))
    reps = modulus_sweep(f, [1.0 / n for n in ns], r, norm, **settings.modulus_kwargs(norm, r))
    return {
        "nu": [n for n, _ in en.pairs],
        "E_all": _floats(e for _, e in en.pairs),
        "n": ns,
        "E": _floats(en.pairs[n - 1][1] for n in ns),
        "omega": _floats(rep.value for rep in reps),
        "notes": list(en.notes),
    }


def _inputs(f, p, alpha, r, n_range, settings):
    return {"f": getattr(f, "name", "f"), "p": "inf" if math.isinf(parse_p(p)) else float(p),
            "alpha": float(alpha), "r": int(r), "n_range": list(n_range),
            "settings": asdict(settings)}


def _band(vals):
    vals = [v for v in vals if np.isfinite(v) and v > 0]
    if len(vals) < 1:
        return math.nan
    return max(vals) / min(vals)


def _slope(xs, ys, floor=FLOOR):
    return fit_loglog(list(zip(xs, ys)), None, floor)[0]


# verdict functions: (series, tolerances, inputs) -> (verdict, checks, constants, slopes)

def _verdict_direct(series, tol, inputs):
    n, E, om = series["n"], series["E"], series["omega"]
    keep = [i for i in range(len(n)) if E[i] > FLOOR and om[i] > FLOOR]
    if len(keep) < 2:
        return True, {"degenerate": True}, {}, {}
    C = [E[i] / om[i] for i in keep]
    sE = _slope([n[i] for i in keep], [E[i] for i in keep])
    sW = _slope([n[i] for i in keep], [om[i] for i in keep])
    band = _band(C)
    checks = {"C_band": band <= tol["stability"],
              "slope_order": sE <= sW + tol["slope"]}
    if tol.get("expected_slope") is not None:
        checks["expected_slope"] = abs(sE - tol["expected_slope"]) <= tol["slope"]
    return all(checks.values()), checks, {"C_max": max(C), "C_min": min(C), "C_band": band}, \
        {"E": sE, "omega": sW}


def rhs_series(nu, E_all, r):
    """``n -> n^{-2r} sum_{nu<=n} nu^{2r-1} E_nu``."""
    s = np.cumsum(np.asarray(nu, dtype=float) ** (2 * r - 1) * np.asarray(E_all))
    return {int(k): float(v) / k ** (2 * r) for k, v in zip(nu, s)}


def _verdict_inverse(series, tol, inputs):
    r = inputs["r"]
    rhs = rhs_series(series["nu"], series["E_all"], r)
    R = [rhs[n] for n in series["n"]]
    om = series["omega"]
    C = []
    for w, b in zip(om, R):
        if w <= FLOOR:
            C.append(0.0)
        elif b <= 0:
            C.append(math.inf)
        else:
            C.append(w / b)
    finite = all(np.isfinite(C))
    degenerate = any(w <= FLOOR for w in om) or min(series["E"]) <= FLOOR
    checks = {"finite": finite}
    band = _band(C)
    if not degenerate:
        checks["C_band"] = bool(band <= tol["stability"])
    consts = {"C_max": max(C), "C_min": min(C), "C_band": band}
    slopes = {"omega": _slope(series["n"], om), "rhs": _slope(series["n"], R)}
    return all(checks.values()), checks, consts, slopes


def _verdict_equivalence(series, tol, inputs):
    r = inputs["r"]
    n, E, om = series["n"], series["E"], series["omega"]
    lam_E = -_slope(n, E)
    lam_w = -_slope(n, om)
    sat = 2 * r - tol["saturation"]
    consts = {}
    if not np.isfinite(lam_E) or lam_E >= sat:
        # E decays too fast (or vanishes): the order is outside (0, 2r)
        # a modulus that vanishes on the range is smoother than any order
        checks = {"outside_0_2r": True,
                  "omega_saturated": bool(not np.isfinite(lam_w) or lam_w >= sat)}
    else:
        checks = {"slopes_agree": bool(abs(lam_E - lam_w) <= tol["slope"])}
    return all(checks.values()), checks, consts, {"lambda_E": lam_E, "lambda_omega": lam_w}


def _verdict_bm(series, tol, inputs):
    checks, consts = {}, {}
    for key in series:
        if key == "n":
            continue
        band = _band(series[key])
        consts[f"{key}_band"] = band
        checks[key] = bool(band <= tol["band"])
    return all(checks.values()), checks, consts, {}


def _verdict_verify(series, tol, inputs):
    checks = {}
    for name, kind, v, t in zip(series["check"], series["kind"], series["value"], series["tol"]):
        v = float(v)
        t = float(t)
        checks[name] = kind == "observation" or bool(np.isfinite(v) and v <= t)
    return all(checks.values()), checks, {}, {}


_VERDICTS = {
    "direct": _verdict_direct,
    "inverse": _verdict_inverse,
    "equivalence": _verdict_equivalence,
    "bm-check": _verdict_bm,
    "verify": _verdict_verify,
}


def _finish(report: ExperimentReport) -> ExperimentReport:
    verdict, checks, consts, slopes = _VERDICTS[report.experiment](
        report.series, report.tolerances, report.inputs)
    report.verdict = bool(verdict)
    report.checks = checks
    report.empirical_constants = consts
    report.slopes = slopes
    return report


def recompute_verdict(report) -> bool:
    """Verdict re-derived from the series, tolerances and inputs alone."""
    d = report.to_dict() if isinstance(report, ExperimentReport) else report
    series = {k: v for k, v in d["series"].items()}
    tol = {k: (float(v) if isinstance(v, str) else v) for k, v in d["tolerances"].items()}
    return bool(_VERDICTS[d["experiment"]](series, tol, d["inputs"])[0])


def _series_for(f, p, alpha, r, n_range, settings, series):
    if series is None:
        series = compute_series(f, p, alpha, r, n_range, settings)
    return {k: v for k, v in series.items() if k != "notes"}, list(series.get("notes", []))


def direct_experiment(f, p="inf", alpha=1.0, r=1, n_range=(8, 48), stability=3.0,
                      slope_tol=0.15, expected_slope=None, settings=None,
                      series=None) -> ExperimentReport:
    """``C_n = E_n / omega_r(f, 1/n)`` stable and ``E_n`` decays at least as fast."""
    settings = settings or ExperimentSettings()
    f = as_function(f)
    window = validate_window(p, alpha, "direct")
    data, notes = _series_for(f, p, alpha, r, n_range, settings, series)
    rep = ExperimentReport("direct", _inputs(f, p, alpha, r, n_range, settings), data,
                           tolerances={"stability": stability, "slope": slope_tol,
                                       "expected_slope": expected_slope},
                           applicable=bool(window), notes=notes)
    if not window:
        rep.notes.append("not applicable: " + window.message)
    return _finish(rep)


def inverse_experiment(f, p=2, alpha=1.0, r=1, n_range=(8, 48), stability=3.0,
                       settings=None, series=None) -> ExperimentReport:
    """``C_n = omega_r(f, 1/n) / (n^{-2r} sum_{nu<=n} nu^{2r-1} E_nu)`` finite and stable."""
    settings = settings or ExperimentSettings()
    f = as_function(f)
    window = validate_window(p, alpha, "inverse")
    data, notes = _series_for(f, p, alpha, r, n_range, settings, series)
    rep = ExperimentReport("inverse", _inputs(f, p, alpha, r, n_range, settings), data,
                           tolerances={"stability": stability}, applicable=bool(window),
                           notes=notes)
    if not window:
        rep.notes.append("not applicable: " + window.message)
    if min(data["E"]) <= FLOOR:
        rep.notes.append("degenerate: E_n vanishes on part of the range, the sum has a zero tail")
    return _finish(rep)


def equivalence_experiment(f, p=2, alpha=1.0, r=1, n_range=(8, 48), slope_tol=0.2,
                           saturation_tol=0.2, settings=None, series=None) -> ExperimentReport:
    """Fitted orders of ``E_n`` and of ``omega_r(f, delta)`` (``delta = 1/n``) coincide."""
    settings = settings or ExperimentSettings()
    f = as_function(f)
    ok = bool(validate_window(p, alpha, "direct")) and bool(validate_window(p, alpha, "inverse"))
    data, notes = _series_for(f, p, alpha, r, n_range, settings, series)
    rep = ExperimentReport("equivalence", _inputs(f, p, alpha, r, n_range, settings), data,
                           tolerances={"slope": slope_tol, "saturation": saturation_tol},
                           applicable=ok, notes=notes)
    rep = _finish(rep)
    if "outside_0_2r" in rep.checks:
        rep.notes.append(f"lambda outside 0 < lambda < 2r = {2 * r}: no equivalence claim")
    if not ok:
        rep.notes.append("not applicable: (p, alpha) outside the theorem windows")
    return rep


def _extremal(V_num, w_num, V_den, w_den):
    """Coefficients maximizing ``||V_num c||_w_num / ||V_den c||_w_den`` (p = 2)."""
    A = (V_num * w_num[:, None]).T @ V_num
    B = (V_den * w_den[:, None]).T @ V_den
    L = np.linalg.cholesky(B)
    Li = np.linalg.inv(L)
    vals, vecs = np.linalg.eigh(Li @ A @ Li.T)
    return Li.T @ vecs[:, -1]


class _BMGrids:
    """Rules for the weights ``alpha``, ``alpha + 1/2`` and ``alpha + rho``."""

    def __init__(self, p, quad_order):
        self.p = p
        self.quad_order = quad_order
        self._cache = {}

    def __call__(self, a):
        if a not in self._cache:
            s = NormSpec(self.p, a, quad_order=self.quad_order)
            self._cache[a] = (s,) + tuple(sample_points(s))
        return self._cache[a]


def _bm_ratios(C, n, alpha, rhos, grids):
    B = basis22(n - 1)
    s0, x0, w0 = grids(alpha)
    sd, xd, wd = grids(alpha + 0.5)
    den = batch_norms(C @ B.vandermonde(x0).T, x0, w0, s0)
    out = {"markov": batch_norms(C @ B.deriv_vandermonde(xd).T, xd, wd, sd) / (n * den)}
    for rho in rhos:
        sr, xr, wr = grids(alpha + rho)
        out[f"rho={rho:g}"] = den / (n ** (2 * rho) * batch_norms(C @ B.vandermonde(xr).T,
                                                                 xr, wr, sr))
    return out


def bm_ratios(coeffs, p=2, alpha=1.0, rhos=(0.5, 1.0), quad_order=256) -> dict:
    """``||P'||_{p,alpha+1/2} / (n ||P||_{p,alpha})`` and
    ``||P||_{p,alpha} / (n^{2 rho} ||P||_{p,alpha+rho})`` for one polynomial.

    ``coeffs`` are the ``P_k^{(2,2)}`` coefficients of ``P``; ``n = len(coeffs)``.
    """
    c = np.atleast_2d(np.asarray(coeffs, dtype=float))
    n = c.shape[1]
    ratios = _bm_ratios(c, n, float(alpha), rhos, _BMGrids(p, max(quad_order, 4 * n)))
    return {k: float(v[0]) for k, v in ratios.items()}


def bernstein_markov_check(p=2, alpha=1.0, n_range=(4, 64), rhos=(0.5, 1.0), seed=0,
                           n_random=8, band=2.0, quad_order=256) -> ExperimentReport:
    """Bands of the two Bernstein-Markov ratios (see :func:`bm_ratios`) over a family.

    The family for degree ``n - 1`` is ``P_{n-1}``, ``n_random`` polynomials with
    seeded standard normal coefficients and, for ``p = 2``, the extremal
    polynomial of each ratio; the reported value per ``n`` is the family maximum.
    """
    lo, hi = n_range
    if lo < 1:
        raise ValueError("n_range must start at 1 or above")
    rng = np.random.default_rng(seed)
    alpha = float(alpha)
    grids = _BMGrids(p, max(quad_order, 4 * hi))
    series = {"n": list(range(lo, hi + 1)), "markov": []}
    for rho in rhos:
        series[f"rho={rho:g}"] = []
    for n in series["n"]:
        B = basis22(n - 1)
        fam = [np.eye(n)[n - 1]] + [rng.standard_normal(n) for _ in range(n_random)]
        extremal = {}
        if parse_p(p) == 2:
            s0, x0, w0 = grids(alpha)
            sd, xd, wd = grids(alpha + 0.5)
            if n >= 2:
                extremal["markov"] = _extremal(B.deriv_vandermonde(xd), wd, B.vandermonde(x0), w0)
            for rho in rhos:
                sr, xr, wr = grids(alpha + rho)
                extremal[f"rho={rho:g}"] = _extremal(B.vandermonde(x0), w0, B.vandermonde(xr), wr)
        for key in series:
            if key == "n":
                continue
            C = np.array(fam + ([extremal[key]] if key in extremal else []))
            series[key].append(float(np.max(_bm_ratios(C, n, alpha, rhos, grids)[key])))
    inputs = {"p": "inf" if math.isinf(parse_p(p)) else float(p), "alpha": alpha,
              "n_range": list(n_range), "rhos": list(rhos), "seed": int(seed),
              "n_random": int(n_random), "quad_order": int(quad_order)}
    rep = ExperimentReport("bm-check", inputs, series, tolerances={"band": band})
    if lo <= 1:
        rep.notes.append("n = 1: constants have zero derivative, the first ratio is 0 "
                         "and is left out of the band")
    return _finish(rep)


@dataclass
class VerifyConfig:
    z_order: int = 64
    functions: tuple = DEFAULT_FAMILY
    tol: float | None = None
    seed: int = 0
    experiments: bool = True

    def to_dict(self):
        return _jsonable(asdict(self))


def theorem_experiments(settings: ExperimentSettings | None = None, seed: int = 0):
    """The theorem-level experiments of the acceptance suite, sharing series."""
    settings = settings or ExperimentSettings()
    absx = make_function("abs")
    abs15 = make_function("abs:lam=1.5")
    sqrt = make_function("sqrtabs")
    s_abs_inf = compute_series(absx, "inf", 1.0, 1, (8, 48), settings)
    s_abs_2 = compute_series(absx, 2, 1.0, 1, (8, 48), settings)
    s_abs15_2 = compute_series(abs15, 2, 1.0, 1, (8, 48), settings)
    s_sqrt_2 = compute_series(sqrt, 2, 1.0, 1, (8, 48), settings)
    return [
        direct_experiment(absx, "inf", 1.0, 1, (8, 48), expected_slope=-1.0,
                          settings=settings, series=s_abs_inf),
        inverse_experiment(absx, 2, 1.0, 1, (8, 48), settings=settings, series=s_abs_2),
        inverse_experiment(abs15, 2, 1.0, 1, (8, 48), settings=settings, series=s_abs15_2),
        equivalence_experiment(absx, 2, 1.0, 1, (8, 48), settings=settings, series=s_abs_2),
        equivalence_experiment(sqrt, 2, 1.0, 1, (8, 48), settings=settings, series=s_sqrt_2),
        bernstein_markov_check(2, 1.0, (4, 64), seed=seed),
    ]


def report_label(rep: ExperimentReport) -> str:
    i = rep.inputs
    p = i["p"] if isinstance(i["p"], str) else f"{i['p']:g}"
    if rep.experiment == "bm-check":
        return f"bm-check[p={p},alpha={i['alpha']:g}]"
    return f"{rep.experiment}[{i['f']},p={p},alpha={i['alpha']:g},r={i['r']}]"


def verify_suite(config: VerifyConfig | None = None,
                 settings: ExperimentSettings | None = None) -> ExperimentReport:
    """Run every module invariant and, optionally, the theorem experiments."""
    config = config or VerifyConfig()
    if not config.functions:
        raise ValueError("empty function selection: refusing to report a vacuous pass")
    start = time.perf_counter()
    rows = run_checks(config.z_order, config.functions, config.tol, config.seed)
    series = {"check": [], "module": [], "kind": [], "value": [], "tol": [], "detail": []}
    for c in rows:
        series["check"].append(c.name)
        series["module"].append(c.module)
        series["kind"].append(c.kind)
        series["value"].append(float(c.value))
        series["tol"].append(float(c.tol))
        series["detail"].append(c.detail)
    sub = []
    if config.experiments:
        sub = theorem_experiments(settings, config.seed)
        for rep in sub:
            series["check"].append(report_label(rep))
            series["module"].append("theorems")
            series["kind"].append("experiment")
            series["value"].append(0.0 if rep.verdict else 1.0)
            series["tol"].append(0.0)
            series["detail"].append("; ".join(f"{k}={'ok' if v else 'FAIL'}"
                                              for k, v in rep.checks.items()))
    rep = ExperimentReport("verify", config.to_dict(), series)
    rep = _finish(rep)
    rep.notes = [f"FAIL {name}: value {v:.3e} > tol {t:.1e} {d}".rstrip()
                 for name, kind, v, t, d in zip(series["check"], series["kind"],
                                                series["value"], series["tol"], series["detail"])
                 if not rep.checks[name]]
    rep.experiments = sub
    rep.elapsed = time.perf_counter() - start
    return rep
