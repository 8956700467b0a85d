"""Gauss-Legendre / Gauss-Jacobi rules and composite integration helpers.

Rules are computed by Newton's method on the three-term recurrence of the
Jacobi polynomials, starting from asymptotic (Chebyshev-angle) guesses, so the
nodes do not depend on any eigenvalue routine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConvergenceError, InvalidArgumentError, NumericError

MAX_POINTS = 64
DEFAULT_POINTS = 12


@dataclass(frozen=True)
class QuadRule:
    """Gauss rule on [-1, 1] for the weight ``(1 - x)^a (1 + x)^b``."""

    nodes: np.ndarray
    weights: np.ndarray
    a: float = 0.0
    b: float = 0.0

    def __len__(self):
        return self.nodes.size

    def mapped(self, left, right):
        """Nodes and weights on ``[left, right]``.

        The weights absorb the affine image of the weight function, i.e. they
        integrate ``g(x)`` against ``(right - x)^a (x - left)^b``.
        """
        half = 0.5 * (right - left)
        x = left + half * (self.nodes + 1.0)
        return x, self.weights * half ** (1.0 + self.a + self.b)


def _jacobi_pair(n, a, b, x):
    """Return P_n^{(a,b)}(x) and P_{n-1}^{(a,b)}(x) by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = 0.5 * (a - b) + 0.5 * (a + b + 2.0) * x
    if n == 1:
        return p, p_prev
    for k in range(2, n + 1):
        c = 2.0 * k + a + b
        a1 = 2.0 * k * (k + a + b) * (c - 2.0)
        a2 = (c - 1.0) * (a * a - b * b)
        a3 = (c - 2.0) * (c - 1.0) * c
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * c
        p, p_prev = ((a2 + a3 * x) * p - a4 * p_prev) / a1, p
    return p, p_prev


def _jacobi_deriv(n, a, b, x, p, p_prev):
    c = 2.0 * n + a + b
    return (n * (a - b - c * x) * p + 2.0 * (n + a) * (n + b) * p_prev) / (c * (1.0 - x * x))


@lru_cache(maxsize=None)
def _jacobi_rule(n, a, b):
    k = np.arange(1, n + 1)
    theta = (k + 0.5 * a - 0.25) * np.pi / (n + 0.5 * (a + b + 1.0))
    x = np.cos(theta)
    for _ in range(100):
        p, p_prev = _jacobi_pair(n, a, b, x)
        ratio = p / _jacobi_deriv(n, a, b, x, p, p_prev)
        # Newton step deflated by the other iterates (Aberth-Ehrlich); this
        # keeps the roots apart even when the Chebyshev-angle guesses are poor
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, np.inf)
        dx = ratio / (1.0 - ratio * (1.0 / diff).sum(axis=1))
        x = x - dx
        if np.all(np.abs(dx) <= 1e-15 * np.maximum(1.0, np.abs(x))):
            break
    else:
        raise ConvergenceError(f"Gauss-Jacobi Newton iteration stalled (n={n}, a={a}, b={b})")
    p, p_prev = _jacobi_pair(n, a, b, x)
    dp = _jacobi_deriv(n, a, b, x, p, p_prev)
    order = np.argsort(x)
    x, dp = x[order], dp[order]
    if np.any(np.diff(x) <= 0) or x[0] <= -1.0 or x[-1] >= 1.0:
        raise ConvergenceError(f"Gauss-Jacobi nodes did not separate (n={n}, a={a}, b={b})")
    log_c = (
        math.lgamma(n + a + 1.0)
        + math.lgamma(n + b + 1.0)
        - math.lgamma(n + a + b + 1.0)
        - math.lgamma(n + 1.0)
        + (a + b + 1.0) * math.log(2.0)
    )
    w = np.exp(log_c) / ((1.0 - x * x) * dp * dp)
    x.setflags(write=False)
    w.setflags(write=False)
    return QuadRule(x, w, float(a), float(b))


def gauss_jacobi(n, a=0.0, b=0.0):
    """n-point Gauss rule for the weight ``(1 - x)^a (1 + x)^b`` on [-1, 1]."""
    if int(n) != n or not 1 <= n <= MAX_POINTS:
        raise InvalidArgumentError(f"number of points must be in [1, {MAX_POINTS}], got {n!r}")
    if a <= -1 or b <= -1:
        raise InvalidArgumentError(f"Jacobi parameters must exceed -1, got a={a}, b={b}")
    return _jacobi_rule(int(n), float(a), float(b))


def gauss_legendre(n):
    return gauss_jacobi(n, 0.0, 0.0)


def _finite(values, what="integrand"):
    values = np.asarray(values)
    if not np.all(np.isfinite(values)):
        raise NumericError(f"{what} produced non-finite values")
    return values


def integrate_element(fn, left, right, n=DEFAULT_POINTS, left_exp=0.0, right_exp=0.0):
    """Integrate ``(x - left)^left_exp (right - x)^right_exp fn(x)`` over [left, right].

    ``fn`` is the smooth remainder and is called once with an array of nodes.
    """
    rule = gauss_jacobi(n, right_exp, left_exp)
    x, w = rule.mapped(left, right)
    return float(w @ _finite(fn(x)))


def graded_rule(left, right, levels, points):
    """Composite Gauss-Legendre rule graded geometrically toward ``left``.

    Panels are ``[left + d 2^-(k+1), left + d 2^-k]`` for ``k < levels`` plus the
    innermost ``[left, left + d 2^-levels]``, where ``d = right - left``.
    """
    rule = gauss_legendre(points)
    d = right - left
    edges = left + d * np.concatenate([[0.0], 2.0 ** -np.arange(levels, -1, -1, dtype=float)])
    lo, hi = edges[:-1], edges[1:]
    half = 0.5 * (hi - lo)
    x = lo[:, None] + half[:, None] * (rule.nodes + 1.0)
    w = half[:, None] * rule.weights
    return x.ravel(), w.ravel()


def integrate_graded(fn, left=0.0, right=1.0, levels=40, points=16):
    """Integrate a function with an integrable power singularity at ``left``."""
    if levels > 60:
        raise InvalidArgumentError("at most 60 grading levels are supported")
    x, w = graded_rule(left, right, levels, points)
    return float(w @ _finite(fn(x)))


def panel_grid(breaks, levels=40, inner_levels=4, points=16):
    """Composite rule for integrands with power-type kinks at ``breaks``.

    Panels run between consecutive breakpoints (which must start at 0 and end
    at 1).  The first panel is graded toward 0 with ``levels`` levels; every
    other panel is graded toward its left end with ``inner_levels`` levels,
    where functions like ``(x - x_k)_+^gamma`` lose smoothness.
    """
    breaks = np.unique(np.asarray(breaks, dtype=float))
    if breaks[0] != 0.0 or breaks[-1] != 1.0:
        raise InvalidArgumentError("panel breakpoints must include 0 and 1")
    xs, ws = [], []
    for k, (lo, hi) in enumerate(zip(breaks[:-1], breaks[1:])):
        x, w = graded_rule(lo, hi, levels if k == 0 else inner_levels, points)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)
