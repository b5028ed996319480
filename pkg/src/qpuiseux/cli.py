"""Command-line driver.

Subcommands::

    solve EQUATION    compute solution branches (JSON or text)
    polygon EQUATION  print the Newton polygon, optionally emit a CSV
    gevrey EQUATION   solve, then estimate q-Gevrey orders per branch
    check EQUATION    verify a solution series stored in a JSON file

Exit codes: 0 success, 1 usage or verification error, 2 branch budget
exhausted.  All numbers in JSON output are strings ("num/den", scalar text)
so exact data survives serialization.

The solution file for ``check`` is JSON of the form
``{"terms": [["1", "1/(q - 1)"], ...], "trunc": "10"}`` with exponents as
rationals and coefficients in scalar text; ``"trunc": "inf"`` marks an
exact series.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction
from typing import List, Optional

from qpuiseux.field import EvalDenominatorZero
from qpuiseux.poly import INF, PuiseuxSeries, format_exponent, parse_exponent, substitute_series
from qpuiseux.polygon import EmptyPolynomial, build_polygon
from qpuiseux.parser import (
    EquationSyntaxError,
    UnsupportedExponent,
    parse_scalar,
    parse_to_poly,
)
from qpuiseux.solver import SolverConfig, result_to_json, solve
from qpuiseux.gevrey import (
    InsufficientCoefficients,
    QModulusOne,
    gevrey_report,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BUDGET = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on bad usage; the contract here is 1
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="qpuiseux", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p_solve = sub.add_parser("solve", help="compute truncated series solutions")
    p_solve.add_argument("equation")
    p_solve.add_argument("--trunc", default="10",
                         help="target truncation exponent (rational)")
    p_solve.add_argument("--max-branches", type=int, default=None)
    p_solve.add_argument("--mode", choices=["exact", "numeric"], default="exact")
    p_solve.add_argument("--q", default=None, help="q value for numeric mode")
    p_solve.add_argument("--format", choices=["json", "text"], default="text")

    p_poly = sub.add_parser("polygon", help="print the Newton polygon")
    p_poly.add_argument("equation")
    p_poly.add_argument("--csv", default=None, metavar="PATH",
                        help="write alpha,height,on_hull rows")

    p_gev = sub.add_parser("gevrey", help="estimate q-Gevrey orders")
    p_gev.add_argument("equation")
    p_gev.add_argument("--q", default="2", help="q value (default 2)")
    p_gev.add_argument("--window", default="50:200", metavar="LO:HI")
    p_gev.add_argument("--csv", default=None, metavar="PATH",
                       help="write m,log_abs_coeff,pointwise_s_m rows")

    p_check = sub.add_parser("check", help="verify a stored solution series")
    p_check.add_argument("equation")
    p_check.add_argument("--solution", required=True, metavar="FILE")
    return parser


def _parse_q(text: str) -> complex:
    try:
        return complex(text)
    except ValueError:
        raise _UsageError("cannot parse q value %r" % text)


def _default_max_branches(given: Optional[int]) -> int:
    if given is not None:
        return given
    env = os.environ.get("QPUISEUX_MAX_BRANCHES")
    if env:
        try:
            return int(env)
        except ValueError:
            raise _UsageError("QPUISEUX_MAX_BRANCHES must be an integer")
    return 64


def _load_series(path: str) -> PuiseuxSeries:
    with open(path, "r", encoding="utf-8") as handle:
        data = json.load(handle)
    trunc = parse_exponent(data.get("trunc", "inf"))
    terms = [(Fraction(e), parse_scalar(c)) for e, c in data.get("terms", [])]
    return PuiseuxSeries.from_terms(terms, trunc)


def _cmd_solve(args) -> int:
    P = parse_to_poly(args.equation)
    cfg = SolverConfig(
        trunc_T=Fraction(args.trunc),
        max_branches=_default_max_branches(args.max_branches),
        mode=args.mode,
        q_value=_parse_q(args.q) if args.q is not None else None,
    )
    result = solve(P, cfg)
    if args.format == "json":
        print(json.dumps(result_to_json(P, result, cfg), indent=2))
    else:
        print("equation: %s" % P.render())
        for i, branch in enumerate(result.branches):
            print("branch %d [%s]: %s" % (i, branch.status_text(), branch.series))
        for note in result.diagnostics:
            print("note: %s" % note)
        if result.budget_exhausted:
            print("branch budget exhausted (%d); results are partial"
                  % cfg.max_branches)
    return EXIT_BUDGET if result.budget_exhausted else EXIT_OK


def _cmd_polygon(args) -> int:
    P = parse_to_poly(args.equation)
    NP = build_polygon(P)
    print("points:")
    for p in NP.points:
        print("  alpha=%s height=%d%s" % (
            format_exponent(p.alpha), p.height,
            " (on hull)" if NP.on_hull(p.pair()) else ""))
    print("vertices: %s" % ", ".join(
        "(%s, %d)" % (format_exponent(a), h) for a, h in NP.vertices))
    if NP.edges:
        for e in NP.edges:
            print("edge (%s, %d) -> (%s, %d): coslope %s%s" % (
                format_exponent(e.high[0]), e.high[1],
                format_exponent(e.low[0]), e.low[1],
                format_exponent(e.coslope),
                "" if e.reaches_height_zero else " [stops above height 0]"))
    else:
        print("edges: none")
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write("alpha,height,on_hull\n")
            for p in NP.points:
                handle.write("%s,%d,%d\n" % (
                    format_exponent(p.alpha), p.height,
                    1 if NP.on_hull(p.pair()) else 0))
    return EXIT_OK


def _cmd_gevrey(args) -> int:
    P = parse_to_poly(args.equation)
    q_value = _parse_q(args.q)
    try:
        lo_text, hi_text = args.window.split(":")
        window = (int(lo_text), int(hi_text))
    except ValueError:
        raise _UsageError("window must be LO:HI, got %r" % args.window)
    cfg = SolverConfig(trunc_T=Fraction(window[1]), max_branches=16)
    result = solve(P, cfg)
    reports = []
    csv_rows = []
    import math as _math
    for idx, branch in enumerate(result.branches):
        report = gevrey_report(branch, P.order, q_value, window)
        entry = {"branch": idx, "status": branch.status_text()}
        entry.update(report.to_json())
        reports.append(entry)
        lnq = _math.log(abs(q_value))
        for m, v in report.per_m:
            csv_rows.append((idx, m, v, 2.0 * v / (m * m * lnq)))
    print(json.dumps({"equation": P.render(), "q": repr(q_value),
                      "reports": reports}, indent=2))
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as handle:
            handle.write("branch,m,log_abs_coeff,pointwise_s_m\n")
            for row in csv_rows:
                handle.write("%d,%d,%.17g,%.17g\n" % row)
    return EXIT_OK


def _cmd_check(args) -> int:
    P = parse_to_poly(args.equation)
    series = _load_series(args.solution)
    residual = substitute_series(P, series)
    val = residual.valuation()
    if val is None:
        text = "inf" if residual.trunc == INF else ">%s" % format_exponent(residual.trunc)
        print("residual valuation: %s" % text)
        return EXIT_OK
    print("residual valuation: %s" % format_exponent(val))
    bound = series.trunc
    if val > bound:
        return EXIT_OK
    sys.stderr.write(
        "verification failed: residual has a term at x^(%s), within the "
        "stated validity %s\n" % (format_exponent(val), format_exponent(bound)))
    return EXIT_USAGE


def run_cli(argv: Optional[List[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "polygon":
            return _cmd_polygon(args)
        if args.command == "gevrey":
            return _cmd_gevrey(args)
        if args.command == "check":
            return _cmd_check(args)
        raise _UsageError("unknown command %r" % args.command)
    except _UsageError as exc:
        sys.stderr.write("usage error: %s\n" % exc)
        return EXIT_USAGE
    except (EquationSyntaxError, UnsupportedExponent) as exc:
        sys.stderr.write("parse error: %s\n" % exc)
        return EXIT_USAGE
    except (EmptyPolynomial, EvalDenominatorZero, InsufficientCoefficients,
            QModulusOne, ValueError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write("error: %s\n" % exc)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
