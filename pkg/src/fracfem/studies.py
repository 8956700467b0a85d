"""Convergence, eigenvalue and conditioning studies over families of uniform meshes."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .assembly import ProblemSpec
from .errors import InvalidArgumentError, UnsupportedExpressionError
from .expr import as_function_expr
from .mesh import FESpace, make_uniform_mesh
from .oracle import (
    REFERENCE_LEVEL,
    ConvergenceReport,
    empirical_rate,
    exact_solution_q0,
    l2_error,
    overall_rate,
    reference_eigenpairs,
    reference_solution,
    theoretical_rate,
)
from .quadrature import DEFAULT_POINTS
from .solver import condition_numbers, solve_fslp, solve_source

log = logging.getLogger(__name__)

EXAMPLES = {
    "a": "x*(1-x)",
    "b1": "1",
    "b2": "(1-x)^(3/5)",
    "c": "step(0,0.5)",
}

MESH_FAMILIES = {
    "pow2": lambda m: 2**m,
    "pow2plus1": lambda m: 2**m + 1,
    "ten_pow2": lambda m: 10 * 2**m,
}

EIGEN_REFERENCE_ELEMENTS = 1280


def elements(mesh, m):
    try:
        return MESH_FAMILIES[mesh](m)
    except KeyError:
        raise InvalidArgumentError(f"unknown mesh family {mesh!r}") from None


def source_for(example=None, f=None):
    """Source term from an example id or an explicit expression."""
    if f is not None:
        return as_function_expr(f), "custom"
    if example not in EXAMPLES:
        raise InvalidArgumentError(f"unknown example {example!r}; choose from {sorted(EXAMPLES)}")
    return as_function_expr(EXAMPLES[example]), example


def run_convergence(alpha, mu, degree, levels, example="a", f=None, q=0.0, mesh="pow2",
                    ref_m=REFERENCE_LEVEL, points=DEFAULT_POINTS, exact=None):
    """L2 errors of ``u_h`` over mesh levels.

    With ``q = 0`` the closed-form solution is the reference whenever it is
    available; otherwise (or with ``exact=False``) a P2 solution on the mesh
    ``h = 2^-ref_m`` is used.
    """
    f, label = source_for(example, f)
    problem = ProblemSpec(alpha, mu, q, f)
    ref_label = f"P2, h=2^-{ref_m}"
    u_ref = None
    if problem.q.is_zero and exact is not False:
        try:
            u_ref = exact_solution_q0(f, problem.alpha)
            ref_label = "exact"
        except UnsupportedExpressionError:
            u_ref = None
    if u_ref is None:
        log.info("computing reference solution (m=%d) for %s", ref_m, label)
        u_ref = reference_solution(problem, ref_m, points=points).u
    errors, hs = [], []
    off_grid = False
    for m in levels:
        n = elements(mesh, m)
        space = FESpace(make_uniform_mesh(n), degree)
        sol = solve_source(problem, space, points)
        breaks = np.union1d(space.mesh.nodes, f.breakpoints)
        off_grid |= breaks.size > space.mesh.nodes.size
        errors.append(l2_error(sol.u, u_ref, problem.alpha, breaks))
        hs.append(1.0 / n)
        log.info("alpha=%g mu=%g P%d m=%d: error %.3e", problem.alpha, problem.mu, degree, m, errors[-1])
    theory = theoretical_rate(problem.alpha, degree, problem.mu, problem.q.is_zero, off_grid)
    return ConvergenceReport(problem.alpha, problem.mu, degree, label, list(levels), hs, errors,
                             theory, ref_label)


@dataclass
class EigenReport:
    """Eigenvalue and eigenfunction errors against a fine-mesh reference."""

    alpha: float
    mu: float
    q: str
    degree: int
    levels: list
    h: list
    lam_ref: np.ndarray
    lam: np.ndarray            # (levels, count)
    lam_errors: np.ndarray     # (count, levels)
    fun_errors: np.ndarray     # (funcs, levels)
    all_real: list = field(default_factory=list)
    reference: str = ""

    def lam_rates(self):
        return np.array([empirical_rate(e, self.h) for e in self.lam_errors])

    def fun_rates(self):
        return np.array([empirical_rate(e, self.h) for e in self.fun_errors])

    def lam_overall(self):
        return np.array([overall_rate(e, self.h) for e in self.lam_errors])

    def fun_overall(self):
        return np.array([overall_rate(e, self.h) for e in self.fun_errors])


def run_eigen_study(alpha, mu, degree, levels, q=0.0, mesh="ten_pow2", count=8, funcs=5,
                    ref_elements=EIGEN_REFERENCE_ELEMENTS, points=DEFAULT_POINTS):
    """Errors of the smallest eigenvalues and eigenfunctions over mesh levels."""
    if funcs > count:
        raise InvalidArgumentError("cannot compare more eigenfunctions than eigenvalues")
    problem = ProblemSpec(alpha, mu, q)
    log.info("computing eigen reference with %d P2 elements", ref_elements)
    ref = reference_eigenpairs(problem, ref_elements, count, points)
    lam_ref = np.array([p.lam for p in ref])
    lams, fun_errs, hs, real = [], [], [], []
    for m in levels:
        n = elements(mesh, m)
        space = FESpace(make_uniform_mesh(n), degree)
        pairs = solve_fslp(problem, space, count, points)
        lams.append([p.lam for p in pairs])
        real.append(all(p.is_real for p in pairs))
        row = []
        for k in range(funcs):
            uh, ur = pairs[k].u, ref[k].u
            plus = l2_error(uh, ur, alpha, space.mesh.nodes)
            minus = l2_error(uh, lambda x, ur=ur: -ur(x), alpha, space.mesh.nodes)
            row.append(min(plus, minus))
        fun_errs.append(row)
        hs.append(1.0 / n)
        log.info("eigen alpha=%g P%d m=%d done", alpha, degree, m)
    lams = np.array(lams)
    return EigenReport(problem.alpha, problem.mu, str(problem.q), degree, list(levels), hs, lam_ref,
                       lams, np.abs(lams - lam_ref[None, :]).T, np.array(fun_errs).T, real,
                       f"P2, h=1/{ref_elements}")


@dataclass
class ConditionReport:
    alpha: float
    mu: float
    q: str
    levels: list
    unpreconditioned: list
    preconditioned: list

    def growth(self):
        w = np.asarray(self.unpreconditioned)
        return w[1:] / w[:-1]


def run_condition_study(alpha, mu, levels, q="x", degree=1, points=DEFAULT_POINTS):
    """``kappa(A)`` and ``kappa(L^{-1} A)`` on meshes ``h = 2^-m``."""
    problem = ProblemSpec(alpha, mu, q)
    W, P = [], []
    for m in levels:
        space = FESpace(make_uniform_mesh(2**m), degree)
        kW, kP = condition_numbers(problem, space, points)
        W.append(kW)
        P.append(kP)
        log.info("cond alpha=%g mu=%g m=%d: W=%.3e P=%.3e", problem.alpha, problem.mu, m, kW, kP)
    return ConditionReport(problem.alpha, problem.mu, str(problem.q), list(levels), W, P)
