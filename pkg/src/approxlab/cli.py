"""Command-line front end: ``approxlab <subcommand> [options]``.

Exit status is 0 when every check passes, 1 when a check fails and 2 for
usage or domain errors (unknown function, out-of-window parameters without
``--force``, unwritable output).
"""

from __future__ import annotations

import argparse
import datetime as _dt
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .best_approx import en_sequence
from .emit import OutputError, Table, write_csv, write_json, write_svg
from .jackson import beta_multipliers, degree_bound, jackson_approximant, jackson_polynomial
from .jacobi import MAX_DEGREE, analyze
from .registry import RegistryError, make_function
from .smoothness import modulus_sweep
from .theorems import (ExperimentSettings, VerifyConfig, bernstein_markov_check,
                       direct_experiment, equivalence_experiment, inverse_experiment,
                       report_label, rhs_series, verify_suite)
from .weighted import NormSpec, parse_p, validate_window, weighted_norm

__all__ = ["main", "run", "build_parser"]

WATERMARK = "outside theorem window"


class UsageError(Exception):
    """Bad arguments; reported with exit status 2."""


def _p(text):
    try:
        return parse_p(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _deltas(text):
    try:
        vals = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"--delta needs numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("--delta needs at least one value")
    return vals


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--f", default="abs", help="function name[:k=v,...] from the registry")
    common.add_argument("--p", type=_p, default=2.0, help="norm exponent, 1 <= p <= inf")
    common.add_argument("--alpha", type=float, default=1.0, help="weight exponent")
    common.add_argument("--r", type=int, default=1, help="order of the difference")
    common.add_argument("--n-min", type=int, default=None, help="first n of the range")
    common.add_argument("--n-max", type=int, default=None, help="last n of the range")
    common.add_argument("--delta", type=_deltas, default=None, help="step bound(s), comma separated")
    common.add_argument("--quad-order", type=int, default=None, help="x rule order for p < inf")
    common.add_argument("--sup-grid", type=int, default=None, help="grid size for p = inf")
    common.add_argument("--tol", type=float, default=None, help="tolerance override")
    common.add_argument("--seed", type=int, default=0, help="seed for random polynomial families")
    common.add_argument("--out", default=None, help="result file, .csv or .json")
    common.add_argument("--svg", default=None, help="log-log chart of the series")
    common.add_argument("--baseline", default=None, help="regression baseline (JSON)")
    common.add_argument("--force", action="store_true",
                        help="run outside the theorem window (outputs are watermarked)")

    parser = argparse.ArgumentParser(prog="approxlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"approxlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    v = sub.add_parser("verify", parents=[common], help="run every invariant and experiment")
    v.add_argument("--z-order", type=int, default=64, help="Chebyshev rule order for checks")
    v.add_argument("--skip-experiments", action="store_true",
                   help="module invariants only, without the theorem experiments")
    sub.add_parser("approx", parents=[common], help="E_n for n = 1..n_max")
    sub.add_parser("modulus", parents=[common], help="omega_r(f, delta)")
    j = sub.add_parser("jackson", parents=[common], help="the Jackson-type polynomial of f")
    j.add_argument("--q", type=int, default=1)
    j.add_argument("--m", type=int, default=3)
    sub.add_parser("direct", parents=[common], help="E_n against omega_r(f, 1/n)")
    sub.add_parser("inverse", parents=[common], help="omega_r(f, 1/n) against the E_nu sum")
    sub.add_parser("equivalence", parents=[common], help="orders from E_n and omega_r")
    sub.add_parser("bm-check", parents=[common], help="Bernstein-Markov ratio bands")
    return parser


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch is not None:
        t = _dt.datetime.fromtimestamp(int(epoch), _dt.timezone.utc)
    else:
        t = _dt.datetime.now(_dt.timezone.utc)
    return t.replace(microsecond=0).isoformat()


def _params(args) -> dict:
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in ("out", "svg", "baseline"):
            continue
        if isinstance(v, float) and math.isinf(v):
            v = "inf"
        out[k] = v
    return out


def _norm(args, p=None) -> NormSpec:
    kw = {}
    if args.quad_order is not None:
        kw["quad_order"] = args.quad_order
    if args.sup_grid is not None:
        kw["sup_grid"] = args.sup_grid
    return NormSpec(args.p if p is None else p, args.alpha, **kw)


def _settings(args) -> ExperimentSettings:
    kw = {}
    if args.quad_order is not None:
        kw["quad_order"] = args.quad_order
    if args.sup_grid is not None:
        kw["sup_grid"] = args.sup_grid
    return ExperimentSettings(**kw)


def _window(args, *theorems):
    """Watermark text if outside the window and forced; raise if not forced."""
    bad = [w for w in (validate_window(args.p, args.alpha, t) for t in theorems) if not w]
    if not bad:
        return None
    if not args.force:
        raise UsageError("; ".join(w.message for w in bad) + " (use --force to run anyway)")
    return WATERMARK


def _range(args, lo, hi):
    lo = args.n_min if args.n_min is not None else lo
    hi = args.n_max if args.n_max is not None else hi
    if not 1 <= lo < hi:
        raise UsageError(f"need 1 <= n-min < n-max, got {lo}, {hi}")
    if hi > MAX_DEGREE + 1:
        raise UsageError(f"n-max beyond {MAX_DEGREE + 1} is not supported")
    return lo, hi


class _Result:
    def __init__(self, table, verdict=None, report=None, chart=None, lines=()):
        self.table = table
        self.verdict = verdict
        self.report = report
        self.chart = chart
        self.lines = list(lines)


def _cmd_approx(args):
    f = make_function(args.f)
    hi = args.n_max if args.n_max is not None else 32
    if not 1 <= hi <= MAX_DEGREE + 1:
        raise UsageError(f"n-max must lie in [1, {MAX_DEGREE + 1}], got {hi}")
    rep = en_sequence(f, hi, _norm(args))
    table = Table(["n", "E_n"], [[n, e] for n, e in rep.pairs])
    chart = {"series": {"E_n": ([n for n, _ in rep.pairs], [e for _, e in rep.pairs])},
             "xlabel": "n", "ylabel": "E_n", "annotations": [f"fitted slope {rep.fitted_slope:.4f}"]}
    lines = [f"{n:4d}  {e:.6e}" for n, e in rep.pairs] + rep.notes
    return _Result(table, None, {"pairs": rep.pairs, "fitted_slope": rep.fitted_slope,
                                 "notes": rep.notes}, chart, lines)


def _cmd_modulus(args):
    f = make_function(args.f)
    deltas = args.delta or [0.1]
    reps = modulus_sweep(f, deltas, args.r, _norm(args))
    rows = [[r.delta, r.value, " ".join(format(t, ".17g") for t in r.argmax_t), r.evaluations]
            for r in reps]
    table = Table(["delta", "omega", "argmax_t", "evaluations"], rows)
    chart = {"series": {"omega": ([r.delta for r in reps], [r.value for r in reps])},
             "xlabel": "delta", "ylabel": "omega_r"}
    lines = [f"delta={r.delta:.6g}  omega={r.value:.6e}" for r in reps]
    return _Result(table, None, {"reports": [vars(r) for r in reps]}, chart, lines)


def _cmd_jackson(args):
    f = make_function(args.f)
    D = degree_bound(args.q, args.m)
    N = max(64, D)
    if N > MAX_DEGREE:
        raise UsageError(f"degree bound {D} exceeds the supported degree {MAX_DEGREE}")
    sf = analyze(f, N)
    Q = jackson_polynomial(sf, args.q, args.m, args.r)
    A = jackson_approximant(sf, args.q, args.m, args.r)
    beta = beta_multipliers(args.q, args.m, N)
    err = weighted_norm(lambda x: f(x) - A(x), _norm(args))
    rows = [[k, sf.coeffs[k], beta[k], Q.coeffs[k]] for k in range(N + 1)]
    table = Table(["k", "c_f", "beta", "c_Q"], rows)
    ks = list(range(1, N + 1))
    chart = {"series": {"|c_f|": (ks, [abs(sf.coeffs[k]) for k in ks]),
                        "|c_Q|": (ks, [abs(Q.coeffs[k]) for k in ks])},
             "xlabel": "k", "ylabel": "|c_k|", "annotations": [f"degree bound {D}"]}
    lines = [f"q={args.q} m={args.m} r={args.r} degree bound {D}",
             f"||f - (-1)^(r+1) Q||_{{p,alpha}} = {err:.6e}"]
    return _Result(table, None, {"degree_bound": D, "error": err}, chart, lines)


def _experiment_table(rep):
    s = rep.series
    if rep.experiment == "inverse":
        rhs = rhs_series(s["nu"], s["E_all"], rep.inputs["r"])
        rows = [[n, e, w, rhs[n], (w / rhs[n]) if rhs[n] > 0 else math.inf]
                for n, e, w in zip(s["n"], s["E"], s["omega"])]
        return Table(["n", "E_n", "omega", "rhs", "C_n"], rows)
    rows = [[n, e, w, (e / w) if w > 0 else math.nan] for n, e, w in zip(s["n"], s["E"], s["omega"])]
    return Table(["n", "E_n", "omega", "C_n"], rows)


def _experiment_result(rep):
    table = _experiment_table(rep)
    s = rep.series
    chart = {"series": {"E_n": (s["n"], s["E"]), "omega(1/n)": (s["n"], s["omega"])},
             "xlabel": "n", "ylabel": "value",
             "annotations": [f"{k} = {v:.4f}" for k, v in rep.slopes.items()]}
    lines = [f"{'PASS' if ok else 'FAIL'} {name}" for name, ok in rep.checks.items()]
    lines += [f"{k} = {v:.6g}" for k, v in {**rep.empirical_constants, **rep.slopes}.items()]
    lines += rep.notes
    return _Result(table, rep.verdict, rep.to_dict(), chart, lines)


def _experiment_args(args):
    f = make_function(args.f)
    lo, hi = _range(args, 8, 48)
    return f, lo, hi


def _cmd_direct(args):
    mark = _window(args, "direct")
    f, lo, hi = _experiment_args(args)
    kw = {"slope_tol": args.tol} if args.tol is not None else {}
    rep = direct_experiment(f, args.p, args.alpha, args.r, (lo, hi), settings=_settings(args), **kw)
    return _experiment_result(rep), mark


def _cmd_inverse(args):
    mark = _window(args, "inverse")
    f, lo, hi = _experiment_args(args)
    rep = inverse_experiment(f, args.p, args.alpha, args.r, (lo, hi), settings=_settings(args))
    return _experiment_result(rep), mark


def _cmd_equivalence(args):
    mark = _window(args, "direct", "inverse")
    f, lo, hi = _experiment_args(args)
    kw = {"slope_tol": args.tol} if args.tol is not None else {}
    rep = equivalence_experiment(f, args.p, args.alpha, args.r, (lo, hi),
                                 settings=_settings(args), **kw)
    return _experiment_result(rep), mark


def _cmd_bm(args):
    lo, hi = _range(args, 4, 64)
    rep = bernstein_markov_check(args.p, args.alpha, (lo, hi), seed=args.seed)
    keys = [k for k in rep.series if k != "n"]
    rows = [[n] + [rep.series[k][i] for k in keys] for i, n in enumerate(rep.series["n"])]
    table = Table(["n"] + keys, rows)
    chart = {"series": {k: (rep.series["n"], rep.series[k]) for k in keys},
             "xlabel": "n", "ylabel": "ratio"}
    lines = [f"{'PASS' if ok else 'FAIL'} {name} band {rep.empirical_constants[name + '_band']:.4f}"
             f" (limit {rep.tolerances['band']:g})" for name, ok in rep.checks.items()]
    return _Result(table, rep.verdict, rep.to_dict(), chart, lines + rep.notes)


def _compare_baseline(path, experiments, rel_tol=1e-6):
    """Compare experiment constants and slopes with a frozen baseline file.

    A missing file is created from the current run.
    """
    current = {}
    for rep in experiments:
        current[report_label(rep)] = {**{f"C.{k}": v for k, v in rep.empirical_constants.items()},
                                **{f"slope.{k}": v for k, v in rep.slopes.items()}}
    path = Path(path)
    if not path.exists():
        write_json({"rel_tol": rel_tol, "experiments": current}, path)
        return [], [f"baseline written to {path}"]
    try:
        base = json.loads(path.read_text())
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read baseline {path}: {exc}") from None
    tol = float(base.get("rel_tol", rel_tol))
    failures = []
    for label, vals in base.get("experiments", {}).items():
        if label not in current:
            failures.append(f"baseline entry {label} was not run")
            continue
        for k, ref in vals.items():
            got = current[label].get(k)
            if got is None or not np.isfinite(got) or abs(got - ref) > tol * max(abs(ref), 1e-300):
                failures.append(f"{label} {k}: {got} vs baseline {ref}")
    return failures, []


def _cmd_verify(args):
    cfg = VerifyConfig(z_order=args.z_order, tol=args.tol, seed=args.seed,
                       experiments=not args.skip_experiments)
    if args.baseline and args.skip_experiments:
        raise UsageError("--baseline compares experiment values; drop --skip-experiments")
    rep = verify_suite(cfg, _settings(args))
    s = rep.series
    rows = [[c, m, k, v, t, rep.checks[c], d] for c, m, k, v, t, d in
            zip(s["check"], s["module"], s["kind"], s["value"], s["tol"], s["detail"])]
    table = Table(["check", "module", "kind", "value", "tol", "passed", "detail"], rows)
    lines = []
    for c, k, v, t, d in zip(s["check"], s["kind"], s["value"], s["tol"], s["detail"]):
        tag = "PASS" if rep.checks[c] else "FAIL"
        if k == "experiment":
            lines.append(f"{tag} {c}  {d}")
        else:
            # name the culprit on failure
            extra = f"  ({d})" if d and not rep.checks[c] else ""
            lines.append(f"{tag} {c}  {v:.3e} <= {t:.1e}{extra}")
    verdict = rep.verdict
    if args.baseline:
        failures, notes = _compare_baseline(args.baseline, rep.experiments)
        lines += notes + [f"FAIL baseline {f}" for f in failures]
        verdict = verdict and not failures
    lines.append(f"{len(rows)} checks, {sum(rep.checks.values())} passed")
    return _Result(table, verdict, rep.to_dict(), None, lines)


_COMMANDS = {
    "verify": _cmd_verify,
    "approx": _cmd_approx,
    "modulus": _cmd_modulus,
    "jackson": _cmd_jackson,
    "direct": _cmd_direct,
    "inverse": _cmd_inverse,
    "equivalence": _cmd_equivalence,
    "bm-check": _cmd_bm,
}


def _emit(args, res: _Result, mark):
    manifest = {"subcommand": args.command, "params": _params(args), "version": __version__,
                "timestamp": _timestamp(),
                "outputs": {k: getattr(args, k) for k in ("out", "svg") if getattr(args, k)}}
    if mark:
        manifest["watermark"] = mark
    table = res.table
    if mark:
        table = Table(table.header + ["watermark"], [r + [mark] for r in table.rows])
    if args.out:
        suffix = Path(args.out).suffix.lower()
        if suffix == ".csv":
            write_csv(table, args.out)
            write_json(manifest, str(args.out) + ".manifest.json")
        elif suffix == ".json":
            write_json({"manifest": manifest, "report": res.report,
                        "table": {"header": table.header, "rows": table.rows},
                        "verdict": res.verdict}, args.out)
        else:
            raise UsageError(f"--out must end in .csv or .json, got {args.out!r}")
    if args.svg:
        if res.chart is None:
            raise UsageError(f"{args.command} has no chart; drop --svg")
        title = f"{args.command} {args.f}" + (f" ({mark})" if mark else "")
        write_svg(args.svg, res.chart["series"], title, res.chart["xlabel"], res.chart["ylabel"],
                  res.chart.get("annotations", ()))


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    handler = _COMMANDS[args.command]
    try:
        if args.out and Path(args.out).suffix.lower() not in (".csv", ".json"):
            raise UsageError(f"--out must end in .csv or .json, got {args.out!r}")
        if args.command in ("approx", "modulus", "jackson"):
            mark = None
            if args.command == "modulus":
                mark = _window(args, "inverse")
            res = handler(args)
        elif args.command in ("direct", "inverse", "equivalence"):
            res, mark = handler(args)
        else:
            mark = None
            res = handler(args)
        _emit(args, res, mark)
    except (UsageError, RegistryError, OutputError, ValueError, IndexError) as exc:
        print(f"approxlab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    for line in res.lines:
        print(line)
    if mark:
        print(f"warning: {mark}")
    if res.verdict is None:
        return 0
    print("verdict: " + ("pass" if res.verdict else "fail"))
    return 0 if res.verdict else 1


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
