"""Command-line front end.

    fracfem converge --alpha 1.55,1.75,1.95 --mu 4 --example a --m 3..8
    fracfem eigen --alpha 1.75 --mu 3 --q x --degree 1 --m 3..6
    fracfem cond --alpha 1.95 --mu alpha-1,3,4 --m 3..9
    fracfem solve --alpha 1.75 --mu 4 --f "x*(1-x)" --m 5
    fracfem --seed-tables --output tables/

Exit status: 0 on success, 2 for usage errors (bad flags, out-of-range
parameters, malformed expressions), 3 for numeric or I/O failures.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

import numpy as np

from .assembly import ProblemSpec
from .errors import ExprParseError, FracFemError, NumericError
from .expr import parse_function_expr
from .mesh import FESpace, make_uniform_mesh
from .oracle import REFERENCE_LEVEL
from .quadrature import DEFAULT_POINTS
from .solver import solve_source
from .studies import (
    EIGEN_REFERENCE_ELEMENTS,
    EXAMPLES,
    MESH_FAMILIES,
    elements,
    run_condition_study,
    run_convergence,
    run_eigen_study,
    source_for,
)
from .tables import Table, condition_table, convergence_table, eigen_table, emit_tables, format_sci

log = logging.getLogger("fracfem")

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3


def _alpha(text):
    try:
        a = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"alpha must be a number, got {text!r}") from None
    if not 1 < a < 2:
        raise argparse.ArgumentTypeError(f"alpha must lie in (1, 2), got {a}")
    return a


def _list(item):
    def parse(text):
        out = [item(t.strip()) for t in text.split(",") if t.strip()]
        if not out:
            raise argparse.ArgumentTypeError("empty list")
        return out

    return parse


def _mu(text):
    if text.replace(" ", "") == "alpha-1":
        return "alpha-1"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"mu must be a number or 'alpha-1', got {text!r}") from None


def _degree(text):
    if text not in ("1", "2"):
        raise argparse.ArgumentTypeError(f"degree must be 1 or 2, got {text!r}")
    return int(text)


def parse_levels(text):
    """``'3..8'``, ``'3,5,7'`` or ``'4'`` to a nonempty ascending list of ints."""
    try:
        if ".." in text:
            lo, hi = text.split("..")
            levels = list(range(int(lo), int(hi) + 1))
        else:
            levels = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"malformed level range {text!r}") from None
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])) or levels[0] < 0:
        raise argparse.ArgumentTypeError(f"level range {text!r} must be nonempty and ascending")
    return levels


def _expr(text):
    try:
        parse_function_expr(text)
    except ExprParseError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None
    return text


def _positive_int(text):
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {v}")
    return v


def build_parser():
    p = argparse.ArgumentParser(prog="fracfem", description=__doc__.split("\n\n")[0],
                                formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--seed-tables", action="store_true",
                   help="run the full table reproduction suite into the --output directory")
    p.add_argument("--output", default=None, help="output file or directory ('-' for stdout)")
    p.add_argument("--format", choices=("csv", "md"), default="md")
    p.add_argument("--quiet", action="store_true", help="suppress progress logs on stderr")
    sub = p.add_subparsers(dest="command")

    def common(sp, multi=False):
        sp.add_argument("--alpha", type=_list(_alpha) if multi else _alpha, required=True)
        sp.add_argument("--mu", type=_list(_mu) if multi else _mu, default=None)
        sp.add_argument("--q", type=_expr, default="0")
        sp.add_argument("--quad-points", type=_positive_int, default=DEFAULT_POINTS)
        sp.add_argument("--output", default=argparse.SUPPRESS)
        sp.add_argument("--format", choices=("csv", "md"), default=argparse.SUPPRESS)
        sp.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)

    s = sub.add_parser("solve", help="solve one source problem and tabulate u_h at the nodes")
    common(s)
    s.add_argument("--degree", type=_degree, default=1)
    s.add_argument("--m", type=int, default=5)
    s.add_argument("--mesh", choices=sorted(MESH_FAMILIES), default="pow2")
    s.add_argument("--example", choices=sorted(EXAMPLES), default="a")
    s.add_argument("--f", type=_expr, default=None)

    c = sub.add_parser("converge", help="L2 errors and rates over mesh levels")
    common(c, multi=True)
    c.add_argument("--degree", type=_list(_degree), default=[1, 2])
    c.add_argument("--m", type=parse_levels, default=parse_levels("3..8"))
    c.add_argument("--mesh", choices=sorted(MESH_FAMILIES), default="pow2")
    c.add_argument("--example", choices=sorted(EXAMPLES), default="a")
    c.add_argument("--f", type=_expr, default=None)
    c.add_argument("--ref-m", type=int, default=REFERENCE_LEVEL)

    e = sub.add_parser("eigen", help="eigenvalue and eigenfunction errors over mesh levels")
    common(e)
    e.add_argument("--degree", type=_degree, default=1)
    e.add_argument("--m", type=parse_levels, default=parse_levels("3..6"))
    e.add_argument("--mesh", choices=sorted(MESH_FAMILIES), default="ten_pow2")
    e.add_argument("--count", type=_positive_int, default=8)
    e.add_argument("--funcs", type=_positive_int, default=5)
    e.add_argument("--ref-n", type=_positive_int, default=EIGEN_REFERENCE_ELEMENTS,
                   help="number of P2 elements of the reference mesh")

    k = sub.add_parser("cond", help="condition numbers with and without the Laplacian preconditioner")
    common(k, multi=True)
    k.add_argument("--m", type=parse_levels, default=parse_levels("3..9"))
    k.set_defaults(q="x")
    return p


def _mu_default(mu, value):
    return value if mu is None else mu


def cmd_solve(args):
    f, _ = source_for(args.example, args.f)
    problem = ProblemSpec(args.alpha, _mu_default(args.mu, 4.0), args.q, f)
    space = FESpace(make_uniform_mesh(elements(args.mesh, args.m)), args.degree)
    sol = solve_source(problem, space, args.quad_points)
    log.info("relative residual %.2e, (D^{2-alpha} w_h)(1) = %.6e", sol.residual, sol.boundary_value)
    x = space.mesh.nodes
    u = np.asarray(sol.u(x))
    w = np.asarray(sol.w(x))
    t = Table(f"solution, alpha={problem.alpha:g}, mu={problem.mu:g}, q={problem.q}, f={problem.f}, "
              f"P{args.degree}, {space.mesh.n} elements", ["x", "w_h", "u_h"])
    for xi, wi, ui in zip(x, w, u):
        t.add([f"{xi:.6g}", format_sci(wi, 6), format_sci(ui, 6)], [float(xi), float(wi), float(ui)])
    return [t]


def cmd_converge(args):
    mus = args.mu or [4.0]
    reports = []
    for a in args.alpha:
        for mu in mus:
            for d in args.degree:
                log.info("converge alpha=%g mu=%s P%d", a, mu, d)
                reports.append(run_convergence(a, mu, d, args.m, args.example, args.f, args.q,
                                               args.mesh, args.ref_m, args.quad_points))
    label = "custom f" if args.f else f"example ({args.example})"
    title = f"L2 error, {label}, q={args.q}, mesh {args.mesh}, reference {reports[0].reference}"
    return [convergence_table(reports, title)]


def cmd_eigen(args):
    r = run_eigen_study(args.alpha, _mu_default(args.mu, 3.0), args.degree, args.m, args.q, args.mesh,
                        args.count, min(args.funcs, args.count), args.ref_n, args.quad_points)
    if not all(r.all_real):
        log.warning("some eigenvalues are complex")
    return [eigen_table(r, "lambda"), eigen_table(r, "u")]


def cmd_cond(args):
    reports = [run_condition_study(a, mu, args.m, args.q, points=args.quad_points)
               for a in args.alpha for mu in (args.mu or ["alpha-1", 3.0, 4.0])]
    return [condition_table(reports)]


def seed_tables(outdir, fmt):
    """Regenerate every study table at desk scale into ``outdir``."""
    os.makedirs(outdir, exist_ok=True)
    alphas = [1.55, 1.75, 1.95]
    lv = list(range(3, 9))

    def conv(name, cases, title):
        reps = [run_convergence(a, mu, d, lv, ex, None, q, mesh) for a, mu, ex, q, mesh in cases
                for d in (1, 2)]
        emit_tables([convergence_table(reps, title)], fmt, os.path.join(outdir, f"{name}.{fmt}"))

    conv("table1", [(a, 4, "a", 0, "pow2") for a in alphas], "example (a), q=0, mu=4")
    conv("table2", [(a, 4, "b1", "x", "pow2") for a in alphas], "example (b1), q=x, mu=4")
    conv("table3", [(a, 4, "b1", "x", "pow2") for a in (1.05, 1.25, 1.45)], "example (b1), q=x, mu=4")
    conv("table4", [(1.75, mu, "b1", "x", "pow2") for mu in (3, "alpha-1", 2)], "example (b1), q=x, alpha=1.75")
    conv("table5", [(a, 3, "b2", "x", "pow2") for a in alphas], "example (b2), q=x, mu=3")
    conv("table6", [(a, 4, "c", "x", "pow2") for a in alphas], "example (c), q=x, mu=4, h=1/2^m")
    conv("table7", [(a, 4, "c", "x", "pow2plus1") for a in alphas], "example (c), q=x, mu=4, h=1/(2^m+1)")
    for q, name in ((0, "eigen_q0"), ("x", "eigen_qx")):
        tabs = []
        for d, levels in ((1, list(range(3, 7))), (2, list(range(1, 5)))):
            r = run_eigen_study(1.75, 3, d, levels, q)
            tabs += [eigen_table(r, "lambda"), eigen_table(r, "u")]
        emit_tables(tabs, fmt, os.path.join(outdir, f"{name}.{fmt}"))
    reps = [run_condition_study(a, mu, [3, 5, 7, 9]) for a in alphas for mu in ("alpha-1", 3, 4)]
    emit_tables([condition_table(reps)], fmt, os.path.join(outdir, f"condition.{fmt}"))


def main(argv=None):
    parser = build_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(levelname)s %(message)s", stream=sys.stderr)
    if args.seed_tables == bool(args.command):
        parser.print_usage(sys.stderr)
        print("fracfem: error: give exactly one of a subcommand or --seed-tables", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.seed_tables:
            seed_tables(args.output or "tables", args.format)
            return EXIT_OK
        run = {"solve": cmd_solve, "converge": cmd_converge, "eigen": cmd_eigen, "cond": cmd_cond}
        tables = run[args.command](args)
        full = emit_tables(tables, args.format, args.output)
        if full:
            log.info("wrote %s and %s", args.output, full)
    except NumericError as exc:
        print(f"fracfem: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except FracFemError as exc:
        print(f"fracfem: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"fracfem: cannot write output: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
