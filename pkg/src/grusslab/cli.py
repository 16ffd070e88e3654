"""Command-line front end.

Exit codes: 0 success, 1 inequality failure, 2 usage error, 3 numerical
non-convergence.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__
from .errors import GrussError, NoConvergence
from .hermitian import matrix_from_json
from .operator_suites import OPERATOR_DOMAIN, OPERATOR_SUITES, check_operator_refinement
from .opmeans import PositivePair
from .means import MeanParams
from .prng import ALGORITHM
from .quadrature import QuadratureConfig
from .runner import (
    ALL_SUITES,
    RunConfig,
    build_report,
    default_workers,
    render_csv,
    render_json,
    replay,
    report_failures,
    run_records,
)
from .scalar_suites import (
    CLAIMED_THRESHOLD,
    SCALAR_SUITES,
    SUITE_DOMAIN,
    crossover_verdict,
    find_ordering_crossovers,
    sweep_rows,
)
from .weights import ALL_WEIGHT_NAMES, weight

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NOCONV = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _suites(text: str) -> tuple:
    names = [s.strip().upper() for s in text.split(",") if s.strip()]
    if names == ["ALL"]:
        return ALL_SUITES
    bad = [s for s in names if s not in ALL_SUITES]
    if bad or not names:
        raise UsageError(f"unknown suite(s) {', '.join(bad) or '(empty)'}; choose from ALL, {', '.join(ALL_SUITES)}")
    return tuple(names)


def _weights(text: str) -> tuple:
    names = tuple(w.strip().lower() for w in text.split(",") if w.strip())
    try:
        for w in names:
            weight(w)
    except ValueError as exc:
        raise UsageError(f"bad weight list {text!r}: {exc}") from None
    return names


def _write(text: str, out: str):
    if out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _quad(args) -> QuadratureConfig:
    return QuadratureConfig(atol=args.quad_atol, rtol=args.quad_rtol)


def _add_tolerances(p):
    p.add_argument("--tol-psd", type=float, default=None,
                   help="absolute Loewner slack (default: 1e-9 * (1 + ||LHS|| + ||RHS||))")
    p.add_argument("--quad-atol", type=float, default=QuadratureConfig.atol)
    p.add_argument("--quad-rtol", type=float, default=QuadratureConfig.rtol)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="grusslab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"grusslab {__version__} ({ALGORITHM})")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="check suites over a seeded random corpus")
    run.add_argument("--suite", default="ALL", help="ALL or a comma-separated list of suite ids")
    run.add_argument("--dim", type=int, default=4)
    run.add_argument("--trials", type=int, default=100)
    run.add_argument("--seed", type=int, default=0)
    _add_tolerances(run)
    run.add_argument("--weights", default=",".join(ALL_WEIGHT_NAMES))
    run.add_argument("--out", default="-")
    run.add_argument("--format", choices=("json", "csv"), default="json")
    run.add_argument("--workers", type=int, default=None, help="worker processes (default: CPU count)")
    run.add_argument("--replay", metavar="DIGEST", help="re-run the single trial named by a failure digest")
    run.add_argument("--input", metavar="FILE",
                     help='JSON {"A": matrix, "B": matrix} checked by the selected operator suites')

    sw = sub.add_parser("sweep", help="tabulate one scalar inequality on a log grid of x = b/a")
    sw.add_argument("ineq", help=f"one of {', '.join(SCALAR_SUITES)}, ENTROPY or EQ6_EQ7")
    sw.add_argument("--lo", type=float, required=True)
    sw.add_argument("--hi", type=float, required=True)
    sw.add_argument("--points", type=int, default=50)
    sw.add_argument("--v", type=float, default=0.5)
    sw.add_argument("--weight", default="identity")
    sw.add_argument("--s", type=float, default=1.0)
    sw.add_argument("--out", default="-")

    cr = sub.add_parser("crossover", help="locate order changes between the two comparison bounds")
    cr.add_argument("--lo", type=float, default=1.0001)
    cr.add_argument("--hi", type=float, default=1e7)
    cr.add_argument("--grid", type=int, default=2000)
    cr.add_argument("--tol", type=float, default=1e-12)
    cr.add_argument("--out", default="-")

    rp = sub.add_parser("replay", help="re-run the single trial named by a failure digest")
    rp.add_argument("digest")
    _add_tolerances(rp)
    rp.add_argument("--out", default="-")
    return parser


def _cmd_replay(digest_text: str, args) -> int:
    try:
        rec = replay(digest_text, _quad(args), args.tol_psd)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _write(json.dumps(rec, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if rec["holds"] else EXIT_FAIL


def _cmd_input(args, suites, weights) -> int:
    bad = [s for s in suites if s not in OPERATOR_SUITES]
    if bad:
        raise UsageError(f"--input supports operator suites only, not {', '.join(bad)}")
    try:
        with open(args.input, encoding="utf-8") as fh:
            obj = json.load(fh)
        pair = PositivePair(matrix_from_json(obj["A"]), matrix_from_json(obj["B"]))
    except (OSError, KeyError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {args.input}: {exc}") from None
    reports = []
    for suite in suites:
        lo, hi = OPERATOR_DOMAIN[suite]
        names = ("affine",) if suite == "OP_ENTROPY" else weights
        for name in names:
            r = check_operator_refinement(suite, pair, MeanParams(), weight(name, lo, hi),
                                          cfg=_quad(args), tol_psd=args.tol_psd)
            d = r.to_dict()
            d["lhs"] = None
            reports.append(d)
    _write(json.dumps(reports, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK if all(r["holds"] for r in reports) else EXIT_FAIL


def _cmd_run(args) -> int:
    suites = _suites(args.suite)
    weights = _weights(args.weights)
    if args.replay:
        return _cmd_replay(args.replay, args)
    if args.input:
        return _cmd_input(args, suites, weights)
    try:
        cfg = RunConfig(suites=suites, dim=args.dim, trials=args.trials, seed=args.seed,
                        tol_psd=args.tol_psd, quad_atol=args.quad_atol, quad_rtol=args.quad_rtol,
                        weights=weights, format=args.format,
                        workers=args.workers if args.workers is not None else default_workers())
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    records = run_records(cfg)
    report = build_report(cfg, records)
    _write(render_json(report) if cfg.format == "json" else render_csv(records), args.out)
    return EXIT_FAIL if report_failures(report) else EXIT_OK


def _cmd_sweep(args) -> int:
    ineq = args.ineq.upper()
    if ineq not in SCALAR_SUITES + ("ENTROPY", "EQ6_EQ7"):
        raise UsageError(f"cannot sweep {args.ineq!r}")
    g = None
    if ineq in SUITE_DOMAIN:
        try:
            g = weight("affine" if ineq == "ENTROPY" else args.weight, *SUITE_DOMAIN[ineq])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
    try:
        rows = sweep_rows(ineq, args.lo, args.hi, args.points, args.v, g, args.s)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    w.writeheader()
    for row in rows:
        w.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    _write(buf.getvalue(), args.out)
    return EXIT_OK


def _cmd_crossover(args) -> int:
    if args.lo <= 0 or args.hi < args.lo or args.grid < 2 or args.tol <= 0:
        raise UsageError("need 0 < lo <= hi, grid >= 2 and tol > 0")
    found = find_ordering_crossovers(args.lo, args.hi, args.grid, args.tol)
    report = {
        "range": [args.lo, args.hi],
        "grid_points": args.grid,
        "bisect_tol": args.tol,
        "crossovers": found,
        "claimed_threshold": CLAIMED_THRESHOLD,
        "verdict": crossover_verdict(found, args.lo, args.hi, grid_points=args.grid),
    }
    _write(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "crossover": _cmd_crossover,
               "replay": lambda a: _cmd_replay(a.digest, a)}[args.command]
    try:
        return handler(args)
    except UsageError as exc:
        parser.error(str(exc))
    except NoConvergence as exc:
        print(f"grusslab: no convergence: {exc}", file=sys.stderr)
        return EXIT_NOCONV
    except (GrussError, ValueError) as exc:
        print(f"grusslab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"grusslab: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
