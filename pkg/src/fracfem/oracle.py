"""Ground truth for convergence studies: exact solutions, fine-mesh references, L2 errors and rates.

For ``q = 0`` the solution of ``-D^alpha u = f, u(0) = u(1) = 0`` is

    u = -I^alpha f + (I^alpha f)(1) x^(alpha - 1),

and ``I^alpha`` is available in closed form for every supported term:

* ``x^p``: the monomial rule;
* ``x^p chi_[a, b]`` with integer ``p``: shifted monomials ``(x - c)_+^(k + alpha)``;
* ``x^p (1 - x)^s``: ``Gamma(p+1)/Gamma(p+alpha+1) x^(p+alpha) 2F1(-s, p+1; p+alpha+1; x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import binom, hyp2f1

from .errors import InvalidArgumentError, UnsupportedExpressionError
from .expr import as_function_expr
from .fraccalc import rl_integral_monomial
from .mesh import FESpace, make_uniform_mesh
from .quadrature import DEFAULT_POINTS, panel_grid
from .solver import solve_fslp, solve_source

REFERENCE_LEVEL = 12


def _shifted_monomial_integral(p, c, alpha, x):
    """``I^alpha [t^p H(t - c)](x)`` for integer ``p >= 0``."""
    r = np.maximum(x - c, 0.0)
    out = np.zeros_like(x)
    for k in range(int(p) + 1):
        coef = binom(p, k) * c ** (p - k) * math.exp(math.lgamma(k + 1) - math.lgamma(k + alpha + 1))
        out += coef * r ** (k + alpha)
    return out


def _term_integral(term, alpha, x):
    if term.omxpow != 0:
        if term.lo > 0 or term.hi < 1:
            raise UnsupportedExpressionError("(1-x)^s times an indicator has no closed form here")
        p, s = term.xpow, term.omxpow
        c = math.exp(math.lgamma(p + 1) - math.lgamma(p + alpha + 1))
        return term.coef * c * x ** (p + alpha) * hyp2f1(-s, p + 1, p + alpha + 1, x)
    if term.lo == 0 and term.hi == 1:
        return term.coef * rl_integral_monomial(term.xpow, alpha, x)
    if not (float(term.xpow).is_integer() and term.xpow >= 0):
        raise UnsupportedExpressionError("indicators are supported only with integer powers of x")
    lo = _shifted_monomial_integral(term.xpow, term.lo, alpha, x)
    hi = _shifted_monomial_integral(term.xpow, term.hi, alpha, x) if term.hi < 1 else 0.0
    return term.coef * (lo - hi)


def frac_integral(f, alpha, x):
    """``(I^alpha f)(x)`` term by term."""
    f = as_function_expr(f)
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    for term in f.terms:
        out = out + _term_integral(term, alpha, x)
    return out


def exact_solution_q0(f, alpha):
    """Callable exact solution of ``-D^alpha u = f`` with homogeneous Dirichlet data."""
    f = as_function_expr(f)
    if not 1 < alpha < 2:
        raise InvalidArgumentError("alpha must lie in (1, 2)")
    at_one = float(frac_integral(f, alpha, np.array([1.0]))[0])

    def u(x):
        x = np.asarray(x, dtype=float)
        out = -frac_integral(f, alpha, x) + at_one * x ** (alpha - 1.0)
        out = np.where(x == 1.0, 0.0, out)
        return float(out) if out.ndim == 0 else out

    return u


_REF_CACHE = {}


def _key(problem, *extra):
    return (problem.alpha, problem.mu, str(problem.q), str(problem.f), *extra)


def reference_solution(problem, fine_m=REFERENCE_LEVEL, degree=2, points=DEFAULT_POINTS):
    """P2 solution on the uniform mesh ``h = 2^-fine_m`` (cached per problem)."""
    if fine_m < 2:
        raise InvalidArgumentError("reference level must be at least 2")
    key = _key(problem, "source", fine_m, degree, points)
    if key not in _REF_CACHE:
        space = FESpace(make_uniform_mesh(2**fine_m), degree)
        _REF_CACHE[key] = solve_source(problem, space, points, lean=True)
    return _REF_CACHE[key]


def reference_eigenpairs(problem, n_fine, count=8, points=DEFAULT_POINTS):
    """P2 eigenpairs on the uniform mesh with ``n_fine`` elements (cached)."""
    key = _key(problem, "eigen", n_fine, count, points)
    if key not in _REF_CACHE:
        space = FESpace(make_uniform_mesh(n_fine), 2)
        _REF_CACHE[key] = solve_fslp(problem, space, count, points)
    return _REF_CACHE[key]


def clear_reference_cache():
    _REF_CACHE.clear()


def l2_error(u_h, u_ref, alpha=None, breaks=None, levels=40, points=16):
    """``||u_h - u_ref||_{L2(0,1)}`` on a graded composite grid.

    ``breaks`` are panel boundaries (typically the coarse mesh nodes plus
    any discontinuities of the data); the first panel is graded toward 0
    where both functions behave like ``x^(alpha-1)``.  ``alpha`` is accepted
    for interface symmetry; the grading is fine enough for every order.
    """
    if breaks is None:
        breaks = np.linspace(0.0, 1.0, 65)
    breaks = np.union1d(np.asarray(breaks, dtype=float), [0.0, 1.0])
    x, w = panel_grid(breaks, levels=levels, points=points)
    d = np.asarray(u_h(x)) - np.asarray(u_ref(x))
    return math.sqrt(float(w @ (np.abs(d) ** 2)))


def empirical_rate(errors, h=None):
    """Rates ``log(e_i/e_{i+1}) / log(h_i/h_{i+1})`` between consecutive levels.

    Without ``h`` the meshes are assumed to halve.  Non-positive errors give
    NaN for the affected rates.
    """
    e = np.asarray(errors, dtype=float)
    if e.size < 2:
        raise InvalidArgumentError("need at least two levels for a rate")
    hh = 2.0 ** -np.arange(e.size) if h is None else np.asarray(h, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.log(e[:-1] / e[1:]) / np.log(hh[:-1] / hh[1:])
    r[(e[:-1] <= 0) | (e[1:] <= 0)] = np.nan
    return r


def overall_rate(errors, h=None):
    """Summary rate from the coarsest and finest levels only."""
    e = np.asarray(errors, dtype=float)
    hh = 2.0 ** -np.arange(e.size) if h is None else np.asarray(h, dtype=float)
    if e[0] <= 0 or e[-1] <= 0:
        return float("nan")
    return float(np.log(e[0] / e[-1]) / np.log(hh[0] / hh[-1]))


def theoretical_rate(alpha, degree, mu, q_is_zero, off_grid_jump=False):
    """Predicted L2 rate, or None where no estimate applies.

    * default: ``alpha + k - 1/2`` with ``k = degree - 1``;
    * ``q = 0`` and ``mu = alpha - 1``: ``alpha + k``;
    * a source jump between mesh nodes: ``alpha - 1/2`` (P1), ``alpha`` (P2);
    * no estimate for ``alpha < 3/2`` or for P2 with ``alpha <= mu < alpha + 1/2``.
    """
    k = degree - 1
    if alpha < 1.5:
        return None
    poisson = mu == alpha - 1.0
    if poisson and q_is_zero:
        return alpha + k
    if off_grid_jump:
        return alpha - 0.5 + 0.5 * k
    if degree == 2 and not poisson and mu < alpha + 0.5:
        return None
    return alpha + k - 0.5


@dataclass
class ConvergenceReport:
    """Errors of one (alpha, mu, degree, example) series over mesh levels."""

    alpha: float
    mu: float
    degree: int
    example: str
    levels: list
    h: list
    errors: list
    theoretical: float | None = None
    reference: str = ""
    labels: list = field(default_factory=list)

    @property
    def rates(self):
        return empirical_rate(self.errors, self.h)

    @property
    def rate(self):
        """Empirical rate between the two finest levels."""
        return float(self.rates[-1])

    @property
    def overall(self):
        return overall_rate(self.errors, self.h)
