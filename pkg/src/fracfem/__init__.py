"""Finite elements for Riemann-Liouville two-point boundary value problems.

The problem ``-D^alpha u + q u = f`` on ``(0, 1)``, ``u(0) = u(1) = 0``,
``1 < alpha < 2``, is solved through the substitution

    u = D^{2-alpha} w - (D^{2-alpha} w)(1) x^mu,

which turns it into a second-order problem for ``w`` with a nonlocal
lower-order term.  ``w`` is approximated by continuous P1 or P2 elements
and ``u`` is reconstructed from it in closed form.
"""

from .assembly import AssembledSystem, ProblemSpec, assemble_system
from .errors import (
    ConvergenceError,
    DivergentIntegralError,
    ExprParseError,
    FracFemError,
    InvalidArgumentError,
    NumericError,
    SingularMatrixError,
    UnsupportedExpressionError,
)
from .expr import FunctionExpr, format_function_expr, parse_function_expr
from .fraccalc import FracOrder, rl_integral_monomial
from .linalg import cond2, eig_dense, shift_invert_eigs
from .mesh import FESpace, Mesh, make_uniform_mesh
from .oracle import ConvergenceReport, empirical_rate, exact_solution_q0, l2_error, reference_solution
from .quadrature import QuadRule, gauss_jacobi, gauss_legendre
from .solver import EigenPair, SolutionField, condition_numbers, solve_fslp, solve_source
from .studies import run_condition_study, run_convergence, run_eigen_study

__all__ = [
    "AssembledSystem", "ConvergenceError", "ConvergenceReport", "DivergentIntegralError", "EigenPair",
    "ExprParseError", "FESpace", "FracFemError", "FracOrder", "FunctionExpr", "InvalidArgumentError",
    "Mesh", "NumericError", "ProblemSpec", "QuadRule", "SingularMatrixError", "SolutionField",
    "UnsupportedExpressionError", "assemble_system", "cond2", "condition_numbers", "eig_dense",
    "empirical_rate", "exact_solution_q0", "format_function_expr", "gauss_jacobi", "gauss_legendre",
    "l2_error", "make_uniform_mesh", "parse_function_expr", "reference_solution", "rl_integral_monomial",
    "run_condition_study", "run_convergence", "run_eigen_study", "shift_invert_eigs", "solve_fslp",
    "solve_source",
]
