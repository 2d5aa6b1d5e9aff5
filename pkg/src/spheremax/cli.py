"""Command line interface: ``spheremax <subcommand> ...``."""

from __future__ import annotations

import argparse
import io
import json
import sys
from pathlib import Path
from typing import Sequence

import numpy as np

from . import __version__
from .arith import singular_series
from .errors import SpheremaxError
from .lattice import ball_count, profile_stats, sphere_count, table_for, write_profile_csv, write_row_csv
from .maximal import DyadicSet, ratio_experiment, write_ratio_csv
from .multiplier import TorusPoint, decompose, m_exact
from .specfun import METHODS, fourier_sphere, krawtchouk
from .sweep import SweepDescriptor, calibrate, check_rows, preamble, sweep_bounds, write_sweep_csv
from .verify import run_checks


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _cmd_count(args) -> int:
    table = table_for(args.d, args.lam)
    if args.row_csv:
        with open(args.row_csv, "w", newline="", encoding="utf-8") as fh:
            write_row_csv(table, args.d, fh, args.lam)
    if args.profile:
        write_profile_csv(profile_stats(args.d, args.lam), sys.stdout)
        return 0
    count = sphere_count(table, args.d, args.lam).value
    ball = ball_count(table, args.d, args.lam).value
    _emit(args, {"d": args.d, "lambda": args.lam, "sphere": str(count), "ball": str(ball)}, str(count))
    return 0


def _cmd_series(args) -> int:
    s = singular_series(args.d, args.lam, args.tail)
    payload = {"d": s.d, "lambda": s.lam, "value": s.value, "P": s.level, "tail_bound": s.tail_bound}
    print(json.dumps(payload, sort_keys=True))
    return 0


def _cmd_specfun(args) -> int:
    out = sys.stdout
    if args.kind == "fourier":
        out.write("r,rho,value\r\n")
        for rho in np.linspace(0.0, args.rho_max, args.points):
            value = fourier_sphere(args.r, float(rho), args.method)
            out.write(f"{args.r},{format(float(rho), '.17g')},{format(value, '.17g')}\r\n")
    else:
        out.write("n,k,x,num,den\r\n")
        for k in range(args.n + 1):
            for x in range(args.n + 1):
                v = krawtchouk(args.n, k, x).value
                out.write(f"{args.n},{k},{x},{v.numerator},{v.denominator}\r\n")
    return 0


def _cmd_multiplier(args) -> int:
    xi = TorusPoint([float(v) for v in args.xi.split(",")])
    if xi.d != args.d:
        raise SystemExit(f"--xi has {xi.d} coordinates, expected {args.d}")
    if args.n is None:
        m = m_exact(args.d, args.lam, xi)
        _emit(args, {"m": [m.real, m.imag]}, format(m.real, ".17g"))
        return 0
    dec = decompose(args.d, args.lam, xi, args.n)
    payload = {
        key: [getattr(dec, key).real, getattr(dec, key).imag]
        for key in ("m_exact", "major_sum", "b_term", "residual")
    }
    text = "\n".join(f"{k} = {format(v[0], '.17g')} {format(v[1], '+.17g')}i" for k, v in payload.items())
    _emit(args, payload, text)
    return 0


def _cmd_sweep(args) -> int:
    desc = SweepDescriptor.from_json(args.descriptor)
    rows = sweep_bounds(desc, threads=args.threads)
    if args.calibrate:
        calibrate(rows)
    buf = io.StringIO()
    write_sweep_csv(rows, buf, desc.seed, desc.family)
    if desc.output:
        Path(desc.output).write_text(buf.getvalue(), encoding="utf-8", newline="")
    else:
        sys.stdout.write(buf.getvalue())
    bad = check_rows(rows)
    for line in bad:
        print(f"FAIL {line}", file=sys.stderr)
    return 1 if bad else 0


def _cmd_maximal(args) -> int:
    dyadic = DyadicSet.up_to(args.dyadic_max_exp)
    rows = ratio_experiment(args.d, args.M, dyadic, args.trials, args.seed, args.mode)
    buf = io.StringIO()
    write_ratio_csv(rows, buf, preamble(args.seed, "maximal_ratio"))
    sys.stdout.write(buf.getvalue())
    return 0


def _cmd_verify(args) -> int:
    failures = 0
    results = []
    for name, ok, detail in run_checks(quick=args.quick):
        results.append({"check": name, "ok": ok, "detail": detail})
        if not args.json:
            print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}", flush=True)
        failures += not ok
    if args.json:
        print(json.dumps(results, sort_keys=True))
    if failures:
        print(f"{failures} invariant(s) violated", file=sys.stderr)
    return 1 if failures else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spheremax", description=__doc__)
    parser.add_argument("--version", action="version", version=f"spheremax {__version__}")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--threads", type=int, default=1, help="worker process cap")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("count", help="exact lattice point counts")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--row-csv", help="write the whole row r_d(0..lambda) as CSV")
    p.add_argument("--profile", action="store_true", help="print the +-1 coordinate histogram")
    p.set_defaults(func=_cmd_count)

    p = sub.add_parser("series", help="singular series with certified tail")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--tail", type=float, default=1e-10)
    p.set_defaults(func=_cmd_series)

    p = sub.add_parser("specfun", help="sphere Fourier transform or Krawtchouk table as CSV")
    kinds = p.add_subparsers(dest="kind", required=True)
    q = kinds.add_parser("fourier")
    q.add_argument("--r", type=int, required=True)
    q.add_argument("--rho-max", type=float, default=10.0)
    q.add_argument("--points", type=int, default=101)
    q.add_argument("--method", choices=METHODS, default="interval_quadrature")
    q = kinds.add_parser("krawtchouk")
    q.add_argument("--n", type=int, required=True)
    p.set_defaults(func=_cmd_specfun)

    p = sub.add_parser("multiplier", help="exact multiplier and its decomposition")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=int, required=True)
    p.add_argument("--xi", required=True, help="comma separated coordinates")
    p.add_argument("--n", type=int, help="split level for the decomposition")
    p.set_defaults(func=_cmd_multiplier)

    p = sub.add_parser("sweep", help="run a JSON sweep descriptor")
    p.add_argument("descriptor")
    p.add_argument("--calibrate", action="store_true", help="rewrite the frozen constant")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("maximal", help="periodic-box maximal ratio experiment")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--M", type=int, required=True)
    p.add_argument("--dyadic-max-exp", type=int, default=2)
    p.add_argument("--trials", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--mode", choices=("auto", "direct", "spectral"), default="auto")
    p.set_defaults(func=_cmd_maximal)

    p = sub.add_parser("verify", help="run the hard-assert invariant suite")
    p.add_argument("--quick", action="store_true")
    p.set_defaults(func=_cmd_verify)
    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except SpheremaxError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run())
