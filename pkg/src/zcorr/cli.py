"""Command-line front end.

Exit codes: 0 ok, 1 validation failure, 2 domain error, 3 I/O error.  The
resolved configuration is written to stderr (as one JSON line) before any
result, so stdout carries data only.
"""

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .correlators import METHODS, CorrelationQuery, evaluate, kappa_curve
from .errors import ZcorrError
from .kernel import PointConfig
from .montecarlo import (
    EnsembleConfig,
    MCConfig,
    centered_bins,
    default_workers,
    ensemble_su2,
    estimate_kappa_mc,
    parse_seed,
)
from .series import DEFAULT_ORDER, kappa_series
from .validation import DEFAULT_SEED, run_validation

EXIT_OK, EXIT_VALIDATION, EXIT_DOMAIN, EXIT_IO = 0, 1, 2, 3


class CliIOError(Exception):
    pass


def fmt(x):
    """15 significant digits, shortest round-trip form."""
    return repr(float(f"{float(x):.15g}"))


def _seed(text):
    try:
        return parse_seed(text)
    except (ValueError, ZcorrError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def load_points(path, m):
    """Read a JSON array of points, each a list of ``m`` ``[re, im]`` pairs."""
    try:
        with open(path, encoding="utf-8") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CliIOError(f"cannot read points file {path}: {exc.strerror}") from None
    try:
        data = json.loads(raw)
        pts = np.array([[complex(re, im) for re, im in point] for point in data])
    except (ValueError, TypeError) as exc:
        raise ZcorrError(f"points file {path} is not a JSON array of [re, im] lists: {exc}") \
            from None
    if pts.ndim != 2 or pts.shape[1] != m:
        raise ZcorrError(f"points file {path}: every point needs m = {m} coordinates")
    return PointConfig(pts)


def _query(args):
    if args.points is not None:
        cfg = load_points(args.points, args.m)
        return CorrelationQuery(cfg.n, args.k, args.m, cfg)
    return CorrelationQuery(2, args.k, args.m, args.r)


def _emit_config(command, args, extra=None):
    cfg = {"command": command}
    cfg.update({k: v for k, v in vars(args).items() if k not in ("func", "command")})
    if extra:
        cfg.update(extra)
    print(json.dumps(cfg, sort_keys=True), file=sys.stderr)
    return cfg


def _write(text, out):
    if out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise CliIOError(f"cannot write {out}: {exc.strerror}") from None


def _envelope(cfg, result):
    return json.dumps({"config": cfg, "result": result}, sort_keys=True) + "\n"


# -- subcommands ----------------------------------------------------------------

def run_eval(args):
    cfg = _emit_config("eval", args)
    q = _query(args)
    if args.method == "mc":
        est = estimate_kappa_mc(q, MCConfig(args.samples, seed=args.seed,
                                            workers=default_workers()))
        value, extra = est.mean, {"stderr": float(fmt(est.stderr)), "samples": est.samples}
    else:
        value, extra = evaluate(q, args.method), {}
    if args.json:
        _write(_envelope(cfg, {"kappa": float(fmt(value)), **extra}), None)
    else:
        line = fmt(value) if not extra else f"{fmt(value)} {fmt(extra['stderr'])}"
        print(line)
    return EXIT_OK


def run_curve(args):
    if not 0 < args.rmin < args.rmax:
        raise ZcorrError("curve needs 0 < rmin < rmax")
    if args.steps < 2:
        raise ZcorrError("curve needs steps >= 2")
    cfg = _emit_config("curve", args)
    rs = np.linspace(args.rmin, args.rmax, args.steps)
    ks = kappa_curve(args.k, args.m, rs)
    if args.json:
        rows = [{"r": float(fmt(r)), "kappa": float(fmt(k))} for r, k in zip(rs, ks)]
        _write(_envelope(cfg, rows), args.out)
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["r", "kappa"])
        for r, k in zip(rs, ks):
            w.writerow([fmt(r), fmt(k)])
        _write(buf.getvalue(), args.out)
    return EXIT_OK


def run_series(args):
    cfg = _emit_config("series", args)
    s = kappa_series(args.k, args.m, args.order)
    if args.json:
        _write(_envelope(cfg, s.to_json_obj()), None)
    else:
        for p, c in s.terms().items():
            print(f"u^{p} {c}")
        print(f"O(u^{s.precision})")
    return EXIT_OK


def run_mc(args):
    cfg = _emit_config("mc", args, {"workers": default_workers()})
    est = estimate_kappa_mc(_query(args), MCConfig(args.samples, seed=args.seed,
                                                   workers=default_workers()))
    result = {"mean": float(fmt(est.mean)), "stderr": float(fmt(est.stderr)),
              "samples": est.samples}
    if args.json:
        _write(_envelope(cfg, result), None)
    else:
        print(f"mean {fmt(est.mean)}\nstderr {fmt(est.stderr)}\nsamples {est.samples}")
    return EXIT_OK


def run_ensemble(args):
    cfg = _emit_config("ensemble", args, {"workers": default_workers()})
    ecfg = EnsembleConfig(args.N, args.trials, centered_bins(args.centers, args.width),
                          seed=args.seed, workers=default_workers())
    bins, discarded = ensemble_su2(ecfg)
    records = [{k: (float(fmt(v)) if isinstance(v, float) else v)
                for k, v in b.to_record().items()} for b in bins]
    if args.json:
        _write(_envelope(cfg, {"bins": records, "discarded": discarded}), None)
    else:
        for rec in records:
            print(json.dumps(rec, sort_keys=True))
    return EXIT_OK


def run_validate(args):
    cfg = _emit_config("validate", args)
    results = run_validation(args.level, args.seed)
    ok = all(r.passed for r in results)
    if args.json:
        rows = [{"check": r.name, "passed": r.passed, "detail": r.detail} for r in results]
        _write(_envelope(cfg, {"passed": ok, "checks": rows}), None)
    else:
        width = max(len(r.name) for r in results)
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")
        print(f"{sum(r.passed for r in results)}/{len(results)} checks passed")
    return EXIT_OK if ok else EXIT_VALIDATION


# -- parser -----------------------------------------------------------------------

def _add_geometry(p, methods=None):
    p.add_argument("--m", type=int, required=True, help="dimension of the manifold")
    p.add_argument("--k", type=int, required=True, help="codimension of the zero set")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--r", type=float, help="scaled distance of a point pair")
    g.add_argument("--points", help="JSON file of points, each a list of [re, im] pairs")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zcorr",
        description="Scaling-limit correlations of zeros of random holomorphic sections.",
    )
    parser.add_argument("--version", action="version", version=f"zcorr {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="evaluate one correlation value")
    _add_geometry(p)
    p.add_argument("--method", choices=METHODS + ("mc",), default="berezin")
    p.add_argument("--samples", type=int, default=10**6, help="samples for --method mc")
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=run_eval)

    p = sub.add_parser("curve", help="tabulate kappa_km(r) as CSV")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--rmin", type=float, default=0.2)
    p.add_argument("--rmax", type=float, default=4.0)
    p.add_argument("--steps", type=int, default=200)
    p.add_argument("--out", default="-", help="output path, '-' for stdout")
    p.set_defaults(func=run_curve)

    p = sub.add_parser("series", help="exact small-r series in u = r^2")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--order", type=int, default=DEFAULT_ORDER)
    p.set_defaults(func=run_series)

    p = sub.add_parser("mc", help="Monte-Carlo estimate of a correlation")
    _add_geometry(p)
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--seed", type=_seed, default=0)
    p.set_defaults(func=run_mc)

    p = sub.add_parser("ensemble", help="empirical kappa_11 from random SU(2) polynomials")
    p.add_argument("--N", type=int, default=200, help="polynomial degree")
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--centers", type=float, nargs="+", default=[0.5, 1.0, 1.5, 2.0, 3.0])
    p.add_argument("--width", type=float, default=0.1)
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.set_defaults(func=run_ensemble)

    p = sub.add_parser("validate", help="run the self-check suite")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    p.add_argument("--seed", type=_seed, default=DEFAULT_SEED)
    p.set_defaults(func=run_validate)

    for sp in sub.choices.values():
        sp.add_argument("--json", action="store_true", help="emit a JSON envelope")
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliIOError as exc:
        print(f"zcorr: error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ZcorrError, ValueError) as exc:
        print(f"zcorr: error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
