"""Command-line front end.

Examples::

    implicitquad --problem annulus --tol 1e-1 1e-2 1e-3 --emit-csv annulus.csv
    implicitquad --domain "1 - x^2 - y^2" --bbox -1 1 -1 1 --tol 1e-6
    implicitquad --problem spline --method adaptive uniform-q --emit-svg spline.svg
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from . import __version__
from .integrator import CLASSIFIERS, IntegrationConfig, integrate, match_uniform_level
from .problem import DEFAULT_ORACLE_TOL, ProblemSpec, bundled_problems, load_problem
from .report import RunResult, emit_svg, runs_to_json, write_csv

METHOD_NAMES = {"adaptive": "adaptive", "uniform-l": "uniform_L", "uniform-q": "uniform_Q"}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="implicitquad",
        description="Integrate F over {f >= 0} with interval-certified adaptive quadtrees.",
    )
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("--list-problems", action="store_true", help="list bundled problems and exit")

    src = p.add_argument_group("problem")
    src.add_argument("--problem", metavar="NAME|PATH", help="problem file or bundled problem name")
    dom = src.add_mutually_exclusive_group()
    dom.add_argument("--domain", metavar="EXPR", help="level-set function f(x, y)")
    dom.add_argument("--spline", metavar="PATH", help="spline surface file used as f")
    src.add_argument("--integrand", metavar="EXPR", help="integrand F(x, y) (default 1)")
    src.add_argument("--bbox", nargs=4, type=float, metavar=("X0", "X1", "Y0", "Y1"))
    src.add_argument("--splits", nargs="*", metavar="x=c|y=c", help="initial split lines")
    src.add_argument("--reference", metavar="VALUE|oracle", help="exact value, or 'oracle'")
    src.add_argument("--oracle-tol", type=float, metavar="TAU", help=f"oracle tolerance (default {DEFAULT_ORACLE_TOL:g})")

    run = p.add_argument_group("method")
    run.add_argument("--tol", nargs="+", type=float, metavar="TAU", help="tolerance sweep (default 1e-3)")
    run.add_argument("--method", nargs="+", choices=list(METHOD_NAMES), default=["adaptive"])
    run.add_argument(
        "--level", nargs="+", type=int, metavar="K",
        help="uniform levels; without it each tolerance picks the coarsest level that meets it",
    )
    run.add_argument("--classifier", choices=CLASSIFIERS, default="interval")
    run.add_argument("--enclosure", choices=("natural", "taylor"), help="interval enclosure form")
    run.add_argument("--gauss-n", type=int, default=2)
    run.add_argument("--min-cell", type=float, metavar="EPS")
    run.add_argument("--max-depth", type=int)
    run.add_argument("--samples", type=int, default=5, help="Sampson samples per Bezier")

    out = p.add_argument_group("output")
    out.add_argument("--report", metavar="PATH", help="JSON report ('-' for stdout)")
    out.add_argument("--emit-csv", metavar="PATH", help="CSV sweep table")
    out.add_argument("--emit-svg", metavar="PATH", help="SVG of the last run")
    out.add_argument("--deterministic", action="store_true", help="zero all timings in the outputs")
    out.add_argument("--quiet", "-q", action="store_true")
    return p


def _problem_from_args(args) -> ProblemSpec:
    if args.problem:
        spec = load_problem(args.problem)
    elif args.domain or args.spline:
        spec = None
    else:
        raise ValueError("give --problem, --domain or --spline")
    fields = {}
    if args.domain or args.spline:
        fields["domain"] = args.domain
        fields["spline"] = args.spline
    if args.integrand is not None:
        fields["integrand"] = args.integrand
    if args.bbox is not None:
        fields["bbox"] = tuple(args.bbox)
    if args.splits is not None:
        fields["singular_splits"] = tuple(args.splits)
    if args.reference is not None:
        fields["reference"] = args.reference
    if args.oracle_tol is not None:
        fields["oracle_tol"] = args.oracle_tol
    if args.enclosure is not None:
        fields["enclosure"] = args.enclosure
    if spec is None:
        name = args.domain or args.spline
        if args.bbox is None:
            raise ValueError("--bbox is required with --domain / --spline")
        return ProblemSpec(name=name, **fields)
    return replace(spec, **fields) if fields else spec


def run_problem(spec: ProblemSpec, base: IntegrationConfig, methods, tolerances, levels, trace_last=False):
    """Run every (method, setting) pair; returns ``(runs, reference)``."""
    reference = spec.reference_value(base)
    f, F, bbox = spec.function, spec.integrand_function, spec.cell
    jobs = []
    for m in methods:
        method = METHOD_NAMES[m]
        if method == "adaptive":
            jobs += [(method, tau, None) for tau in tolerances]
        elif levels:
            jobs += [(method, None, k) for k in levels]
        else:
            if reference is None:
                raise ValueError(f"{m} needs --level or a reference to match the tolerances")
            jobs += [(method, tau, None) for tau in tolerances]
    runs = []
    for i, (method, tau, k) in enumerate(jobs):
        trace = trace_last and i == len(jobs) - 1
        cfg = spec.config(base, method=method, trace=trace)
        if method == "adaptive":
            rep = integrate(f, F, bbox, replace(cfg, tau=tau))
            setting = tau
        elif k is not None:
            rep = integrate(f, F, bbox, replace(cfg, uniform_level=k))
            setting = k
        else:
            rep = match_uniform_level(f, F, bbox, tau, reference, replace(cfg, uniform_level=0))
            setting = rep.level
        error = abs(rep.value - reference) if reference is not None else None
        runs.append(RunResult(rep, setting, error))
    return runs, reference


def _summary(runs, out):
    print(f"{'method':<10} {'setting':>8} {'value':>20} {'error':>10} {'n_in':>6} {'n_bd':>6} {'cr':>5}", file=out)
    for r in runs:
        rep = r.report
        err = f"{r.error:.3e}" if r.error is not None else "-"
        print(
            f"{r.method:<10} {r.setting:>8g} {rep.value:>20.14g} {err:>10} "
            f"{rep.n_interior:>6} {rep.n_boundary:>6} {rep.cr:>5.2f}",
            file=out,
        )
        for w in rep.warnings:
            print(f"  warning: {w}", file=out)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.list_problems:
        print("\n".join(bundled_problems()))
        return 0
    try:
        spec = _problem_from_args(args)
        base = IntegrationConfig(
            gauss_n=args.gauss_n,
            min_cell=args.min_cell,
            classifier=args.classifier,
            n_samples=args.samples,
            max_depth=args.max_depth,
        )
        tolerances = args.tol or list(spec.tolerances) or [1e-3]
        runs, reference = run_problem(
            spec, base, args.method, tolerances, args.level, trace_last=bool(args.emit_svg)
        )
    except (ValueError, OSError, ArithmeticError) as exc:
        print(f"implicitquad: error: {exc}", file=sys.stderr)
        return 2
    if args.deterministic:
        for r in runs:
            r.report.elapsed = 0.0
    try:
        if args.report:
            text = runs_to_json(runs, spec.name, reference)
            if args.report == "-":
                sys.stdout.write(text + "\n")
            else:
                with open(args.report, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
        if args.emit_csv:
            write_csv(runs, args.emit_csv)
        if args.emit_svg:
            emit_svg(runs[-1].report.trace, spec.function, spec.cell, args.emit_svg)
    except OSError as exc:
        print(f"implicitquad: error: {exc}", file=sys.stderr)
        return 1
    if not args.quiet and args.report != "-":
        _summary(runs, sys.stdout)
    return 0


if __name__ == "__main__":
    sys.exit(main())
