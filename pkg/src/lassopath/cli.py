"""Command-line front end: ``lasso-path gen | path | verify | stats | plot-data``.

Exit codes: 0 success, 1 verification failure, 2 I/O or parse error,
3 truncated path or exhausted precision (partial output is still written).
Set ``LASSO_PATH_LOG`` to a logging level name (e.g. ``DEBUG``) for
diagnostics on stderr.
"""

import argparse
import json
import logging
import os
import sys

import numpy as np

from .adversarial import gen_pathological, worst_case_segments
from .approx import ApproxOptions, compute_approx_path
from .exceptions import (
    LassoPathError,
    MaxKinksExceeded,
    ParseError,
    PrecisionExhausted,
    TruncatedPath,
)
from .homotopy import HomotopyOptions, compute_exact_path
from .io import emit_plot_data, ingest, read_instance, read_path, write_instance, write_path
from .model import ProblemInstance
from .verify import check_structural_bounds, count_segments, verify_path

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_IO = 2
EXIT_TRUNCATED = 3

log = logging.getLogger("lassopath")


def _setup_logging():
    level = os.environ.get("LASSO_PATH_LOG")
    if not level:
        return
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )


def _output(out):
    return sys.stdout if out in (None, "-") else out


def _load_instance(args):
    fmt = args.format
    if fmt is None:
        fmt = "csv" if str(args.instance).lower().endswith(".csv") else "json"
    if fmt == "json" and not args.normalize:
        inst, _ = read_instance(args.instance)
        return inst
    return ingest(args.instance, fmt, args.normalize)


def cmd_gen(args):
    meta = {"generated_by": "lasso-path gen"}
    if args.random:
        if args.p is None or args.n is None:
            raise ParseError("--random needs --n and --p")
        rng = np.random.default_rng(args.seed)
        inst = ProblemInstance(rng.standard_normal(args.n), rng.standard_normal((args.n, args.p)))
        meta.update(name=f"random-n{args.n}-p{args.p}", seed=args.seed)
        write_instance(inst, _output(args.out), meta)
        return EXIT_OK
    if args.p is None:
        raise ParseError("gen needs --p")
    meta.update(name=f"pathological-p{args.p}", alpha_factor=args.alpha_factor)
    try:
        inst = gen_pathological(args.p, args.alpha_factor, args.precision, event_tol=args.event_tol)
    except PrecisionExhausted as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.achieved_p >= 1:
            inst = gen_pathological(
                exc.achieved_p, args.alpha_factor, args.precision, event_tol=args.event_tol
            )
            meta.update(name=f"pathological-p{exc.achieved_p}", requested_p=args.p)
            write_instance(inst, _output(args.out), meta)
        return EXIT_TRUNCATED
    write_instance(inst, _output(args.out), meta)
    return EXIT_OK


def cmd_path(args):
    inst = _load_instance(args)
    out = _output(args.out)
    try:
        if args.approx:
            if args.eps is None:
                raise ParseError("--approx needs --eps")
            opts = ApproxOptions(args.eps, args.lambda1, precision=args.precision)
            path = compute_approx_path(inst, opts)
        else:
            kw = {"lambda_min": args.lambda_min, "precision": args.precision}
            if args.event_tol is not None:
                kw["event_tol"] = args.event_tol
            path = compute_exact_path(inst, HomotopyOptions(**kw))
    except (TruncatedPath, MaxKinksExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        write_path(exc.path, out)
        return EXIT_TRUNCATED
    write_path(path, out)
    log.info("%d kinks written", len(path.kinks))
    return EXIT_OK


def cmd_verify(args):
    inst = _load_instance(args)
    path = read_path(args.path)
    report = verify_path(inst, path, args.eps, args.samples)
    print(json.dumps(report.to_dict(), indent=2))
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def cmd_stats(args):
    path = read_path(args.path)
    upper_ok, antipodal_ok = check_structural_bounds(path)
    steps = [k.step for k in path.kinks]
    stats = {
        "kind": path.kind,
        "epsilon": path.epsilon,
        "p": path.p,
        "segments": count_segments(path),
        "records": len(path.kinks),
        "first_order_steps": steps.count("first_order"),
        "lambda_max": path.lambda_max,
        "lambda_last": float(path.kinks[-1].lam),
        "worst_case_bound": worst_case_segments(path.p),
        "upper_bound_ok": upper_ok,
        "antipodal_free": antipodal_ok,
        "complete": path.terminal,
    }
    print(json.dumps(stats, indent=2))
    return EXIT_OK


def cmd_plot_data(args):
    path = read_path(args.path)
    emit_plot_data(path, _output(args.out))
    return EXIT_OK


def build_parser():
    ap = argparse.ArgumentParser(
        prog="lasso-path",
        description="Exact and approximate Lasso regularization paths.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="Write a worst-case (or random) instance as JSON.")
    g.add_argument("--p", type=int, help="Number of variables.")
    g.add_argument("--n", type=int, help="Number of observations (--random only).")
    g.add_argument("--random", action="store_true", help="Gaussian instance instead of the worst case.")
    g.add_argument("--seed", type=int, default=0, help="Seed for --random.")
    g.add_argument("--alpha-factor", type=float, default=0.5, help="Fraction of the admissible alpha bound.")
    g.add_argument("--precision", type=int, default=None, help="mpfr bits for the path computations.")
    g.add_argument("--event-tol", type=float, default=None, help="Relative tie tolerance between events.")
    g.add_argument("--out", default=None, help="Output file (default stdout).")
    g.set_defaults(func=cmd_gen)

    def add_input(sp):
        sp.add_argument("instance", help="Instance JSON or CSV dataset.")
        sp.add_argument("--format", choices=["csv", "json"], default=None, help="Input format (default from extension).")
        sp.add_argument("--normalize", action="store_true", help="Center and unit-normalize X columns and y.")

    pth = sub.add_parser("path", help="Compute an exact or approximate path.")
    add_input(pth)
    mode = pth.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="Exact homotopy (default).")
    mode.add_argument("--approx", action="store_true", help="Approximate homotopy at --eps.")
    pth.add_argument("--eps", type=float, default=None, help="Target relative duality gap.")
    pth.add_argument("--lambda1", type=float, default=None, help="Lower end of the approximate path.")
    pth.add_argument("--lambda-min", type=float, default=0.0, help="Stop the exact path at this lambda.")
    pth.add_argument("--precision", type=int, default=None, help="mpfr bits (default float64).")
    pth.add_argument("--event-tol", type=float, default=None, help="Relative tie tolerance between events.")
    pth.add_argument("--out", default=None, help="Output path file (default stdout).")
    pth.set_defaults(func=cmd_path)

    v = sub.add_parser("verify", help="Certify a path by duality gaps.")
    add_input(v)
    v.add_argument("path", help="Path JSON file.")
    v.add_argument("--eps", type=float, default=None, help="Target (default: the path's own epsilon).")
    v.add_argument("--samples", type=int, default=100, help="Number of sampled lambdas.")
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("stats", help="Segment counts and structural checks of a path.")
    s.add_argument("path", help="Path JSON file.")
    s.set_defaults(func=cmd_stats)

    pl = sub.add_parser("plot-data", help="CSV of sign(w)|w|^0.1 per kink.")
    pl.add_argument("path", help="Path JSON file.")
    pl.add_argument("--out", default=None, help="Output CSV (default stdout).")
    pl.set_defaults(func=cmd_plot_data)
    return ap


def main(argv=None):
    _setup_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ParseError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, LassoPathError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
