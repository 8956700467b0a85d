"""Galerkin matrices and vectors of the transformed problem.

For the unknown ``w`` the bilinear form is

    A(w, v) = (w', v') + (q D w, v) + (D w)(1) (p, v),    D = D^{2-alpha},

with ``p(x) = c0 x^(mu-alpha) - q(x) x^mu``.  Entry ``(j, i)`` of every
matrix pairs test function ``phi_j`` (row) with trial function ``phi_i``
(column), so the assembled matrix is

    A = L + B + outer(r, g),   r_j = (p, phi_j),   g_i = (D phi_i)(1).

For the eigenproblem the right-hand side matrix is ``M = B1 - outer(m, g)``
with ``B1`` the nonlocal block for ``q = 1`` and ``m_j = (x^mu, phi_j)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import binom

from .errors import InvalidArgumentError, NumericError, UnsupportedExpressionError
from .expr import FunctionExpr, as_function_expr
from .fraccalc import FracOrder, boundary_vector, element_integrals, unit_pieces
from .mesh import MIDPOINT, VERTEX
from .quadrature import DEFAULT_POINTS, gauss_jacobi

ALPHA_MINUS_ONE = "alpha-1"


@dataclass(frozen=True)
class ProblemSpec:
    """One instance of ``-D^alpha u + q u = f`` (or the eigenproblem when ``f`` is None).

    ``mu`` is the exponent of the correction term ``x^mu``; pass the string
    ``"alpha-1"`` (or the exact float) for the Poisson-like variant.
    """

    alpha: float
    mu: float
    q: FunctionExpr
    f: FunctionExpr | None = None

    def __init__(self, alpha, mu, q=0.0, f=None):
        order = FracOrder(alpha)
        alpha = order.alpha
        if isinstance(mu, str):
            if mu.replace(" ", "") != ALPHA_MINUS_ONE:
                raise InvalidArgumentError(f"mu must be a number or {ALPHA_MINUS_ONE!r}, got {mu!r}")
            mu = alpha - 1.0
        mu = float(mu)
        if not math.isfinite(mu):
            raise InvalidArgumentError("mu must be finite")
        if abs(mu - (alpha - 1.0)) <= 1e-14:
            mu = alpha - 1.0
        elif mu < alpha:
            raise InvalidArgumentError(f"mu must satisfy mu >= alpha or mu = alpha - 1 (alpha={alpha}, mu={mu})")
        q = as_function_expr(q)
        if not q.is_polynomial:
            raise UnsupportedExpressionError(f"the potential must be a polynomial, got {q}")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "q", q)
        object.__setattr__(self, "f", None if f is None else as_function_expr(f))

    @property
    def order(self):
        return FracOrder(self.alpha)

    @property
    def mu_is_alpha_minus_one(self):
        return self.mu == self.alpha - 1.0

    @property
    def c0(self):
        """``Gamma(mu+1)/Gamma(1+mu-alpha)``, zero in the ``mu = alpha - 1`` case."""
        if self.mu_is_alpha_minus_one:
            return 0.0
        return math.gamma(self.mu + 1.0) / math.gamma(1.0 + self.mu - self.alpha)

    @property
    def p(self):
        """``p(x) = c0 x^(mu-alpha) - q(x) x^mu`` as a FunctionExpr."""
        out = -(self.q * FunctionExpr.x_power(self.mu))
        if self.c0 != 0.0:
            out = out + FunctionExpr.x_power(self.mu - self.alpha, self.c0)
        return out


@dataclass
class AssembledSystem:
    """Parts of the discrete operator: ``A = L + B + outer(r, g)``.

    ``L`` and ``B`` are None for systems assembled in lean mode, where only
    ``A`` is kept to save memory.
    """

    A: np.ndarray
    L: np.ndarray | None
    B: np.ndarray | None
    g: np.ndarray
    r: np.ndarray
    rhs: np.ndarray | None


def _local_laplacian(degree):
    if degree == 1:
        return np.array([[1.0, -1.0], [-1.0, 1.0]])
    return np.array([[7.0, -8.0, 1.0], [-8.0, 16.0, -8.0], [1.0, -8.0, 7.0]]) / 3.0


def add_laplacian(space, out):
    """Add ``(phi_i', phi_j')`` into the dense matrix ``out`` in place."""
    K = _local_laplacian(space.degree)
    dofs = space.element_dofs
    h = space.mesh.h
    for l1 in range(dofs.shape[1]):
        for l2 in range(dofs.shape[1]):
            ok = (dofs[:, l1] >= 0) & (dofs[:, l2] >= 0)
            np.add.at(out, (dofs[ok, l1], dofs[ok, l2]), K[l1, l2] / h[ok])
    return out


def assemble_laplacian(space):
    """Stiffness matrix ``(phi_i', phi_j')``; symmetric positive definite."""
    N = space.dof_count
    return add_laplacian(space, np.zeros((N, N)))


def _shape_weights(space, xl, xr, qfun):
    def wf(x):
        tau = (x - xl) / (xr - xl)
        return space.local_shapes(tau) * qfun(x)

    return wf


def _nonlocal_general(space, q, gamma, points, out):
    mesh = space.mesh
    P = space.pieces
    dofs = space.element_dofs
    for e in range(mesh.n):
        xl, xr = mesh.nodes[e], mesh.nodes[e + 1]
        R = element_integrals(P, gamma, xl, xr, _shape_weights(space, xl, xr, q), points)
        if not np.all(np.isfinite(R)):
            bad = np.argwhere(~np.isfinite(R))[0]
            raise NumericError(f"non-finite nonlocal entry (j={dofs[e, bad[1]]}, i={bad[0]})")
        for l, j in enumerate(dofs[e]):
            if j >= 0:
                out[j] += R[:, l]
    return out


def lattice_moments(kind, degree, gamma, dmax, nshift, points=DEFAULT_POINTS):
    """Moments ``E[d, l, s] = int_0^1 k(d + y) y^s psi_l(y) dy`` on the unit lattice.

    ``k`` is the unit kernel of the given kind; ``psi_l`` are the local shape
    functions; ``d`` runs from the first offset with nonzero overlap (-1 for
    vertices, 0 for midpoints) to ``dmax``.  Returns ``(dmin, E)``.
    """
    dmin = -1 if kind == VERTEX else 0
    d = np.arange(dmin, dmax + 1)
    P = unit_pieces(kind, degree, -d.astype(float))
    nloc = degree + 1

    def wf(y):
        tau = y
        if degree == 1:
            shapes = np.stack([1 - tau, tau])
        else:
            shapes = np.stack([(1 - tau) * (1 - 2 * tau), 4 * tau * (1 - tau), tau * (2 * tau - 1)])
        powers = np.stack([y**s for s in range(nshift)])
        return (shapes[:, None, :] * powers[None, :, :]).reshape(nloc * nshift, -1)

    E = element_integrals(P, gamma, 0.0, 1.0, wf, points)
    return dmin, E.reshape(d.size, nloc, nshift)


def _nonlocal_lattice(space, coeffs, gamma, points, out):
    n = space.mesh.n
    h = 1.0 / n
    S = coeffs.size
    dofs = space.element_dofs
    kinds = [VERTEX] if space.degree == 1 else [VERTEX, MIDPOINT]
    tables = {}
    for kind in kinds:
        dmin, E = lattice_moments(kind, space.degree, gamma, n, S, points)
        sel = np.flatnonzero(space.kinds == kind)
        tables[kind] = (dmin, E, sel, space.anchors[sel])
    # Q[e, s] = sum_r c_r binom(r, s) x_e^(r - s), q re-expanded at each left node
    xe = np.arange(n) * h
    r = np.arange(S)
    Q = np.zeros((n, S))
    for s in range(S):
        Q[:, s] = (coeffs[s:] * binom(r[s:], s) * xe[:, None] ** (r[s:] - s)).sum(axis=1)
    Q *= h ** (gamma + np.arange(S))
    for e in range(n):
        for kind, (dmin, E, sel, anchors) in tables.items():
            d = e - anchors
            ok = d >= dmin
            if not np.any(ok):
                continue
            vals = E[d[ok] - dmin] @ Q[e]
            cols = sel[ok]
            for l, j in enumerate(dofs[e]):
                if j >= 0:
                    out[j, cols] += vals[:, l]
    return out


def assemble_nonlocal(space, q, order, points=DEFAULT_POINTS, method="auto", out=None):
    """Nonlocal block ``B[j, i] = (D^{2-alpha} phi_i, q phi_j)``.

    ``method`` is ``"general"`` (element by element, any mesh), ``"lattice"``
    (uniform meshes with polynomial q: every element integral is a shifted
    copy of a unit-lattice moment) or ``"auto"``.  With ``out`` the block is
    added into an existing array.
    """
    order = order if isinstance(order, FracOrder) else FracOrder(order)
    q = as_function_expr(q)
    N = space.dof_count
    if out is None:
        out = np.zeros((N, N))
    if q.is_zero:
        return out
    if method == "auto":
        method = "lattice" if space.mesh.is_uniform and q.is_polynomial else "general"
    if method == "lattice":
        if not space.mesh.is_uniform:
            raise InvalidArgumentError("lattice assembly needs a uniform mesh")
        return _nonlocal_lattice(space, q.poly_coeffs(), order.gamma, points, out)
    if method != "general":
        raise InvalidArgumentError(f"unknown assembly method {method!r}")
    return _nonlocal_general(space, q, order.gamma, points, out)


def _is_int(v):
    return float(v).is_integer()


def _term_load(space, term, points):
    """``(term, phi_j)`` contributions per element and local shape, shape (n, nloc)."""
    mesh = space.mesh
    xl, xr = mesh.nodes[:-1], mesh.nodes[1:]
    lo = np.maximum(xl, term.lo)
    hi = np.minimum(xr, term.hi)
    live = hi > lo
    nloc = space.degree + 1
    out = np.zeros((mesh.n, nloc))
    left_sing = (lo == 0.0) & live & (not _is_int(term.xpow) or term.xpow < 0)
    right_sing = (hi == 1.0) & live & (not _is_int(term.omxpow) or term.omxpow < 0)
    plain = live & ~left_sing & ~right_sing
    groups = [
        (plain, (0.0, 0.0)),
        (left_sing & ~right_sing, (term.xpow, 0.0)),
        (right_sing & ~left_sing, (0.0, term.omxpow)),
        (left_sing & right_sing, (term.xpow, term.omxpow)),
    ]
    for mask, (bx, bo) in groups:
        if not np.any(mask):
            continue
        rule = gauss_jacobi(points, bo, bx)
        a, b = lo[mask][:, None], hi[mask][:, None]
        half = 0.5 * (b - a)
        x = a + half * (rule.nodes + 1.0)
        w = rule.weights * half ** (1.0 + bx + bo)
        v = term.coef * np.ones_like(x)
        if term.xpow - bx != 0:
            v = v * x ** (term.xpow - bx)
        if term.omxpow - bo != 0:
            v = v * (1.0 - x) ** (term.omxpow - bo)
        e = np.flatnonzero(mask)
        tau = (x - xl[e][:, None]) / mesh.h[e][:, None]
        shapes = space.local_shapes(tau)
        out[e] = np.einsum("eq,leq->el", v * w, shapes)
    if not np.all(np.isfinite(out)):
        raise NumericError(f"non-finite load integral for term {term}")
    return out


def assemble_load(space, f, points=DEFAULT_POINTS):
    """Load vector ``(f, phi_j)``.

    Each term is integrated panel by panel: panels are the elements cut at
    indicator endpoints, and endpoint powers at 0 or 1 are absorbed into a
    Gauss-Jacobi weight.
    """
    f = as_function_expr(f)
    per_elem = np.zeros((space.mesh.n, space.degree + 1))
    for term in f.terms:
        per_elem += _term_load(space, term, points)
    out = np.zeros(space.dof_count)
    dofs = space.element_dofs
    for l in range(dofs.shape[1]):
        ok = dofs[:, l] >= 0
        np.add.at(out, dofs[ok, l], per_elem[ok, l])
    return out


def assemble_rank_one(space, p, order, points=DEFAULT_POINTS):
    """Vectors ``g_i = (D^{2-alpha} phi_i)(1)`` and ``r_j = (p, phi_j)``."""
    return boundary_vector(space, order), assemble_load(space, p, points)


def assemble_recon_mass(space, order, mu, points=DEFAULT_POINTS, B1=None):
    """``M[j, i] = (D^{2-alpha} phi_i, phi_j) - g_i (x^mu, phi_j)``."""
    if B1 is None:
        B1 = assemble_nonlocal(space, 1.0, order, points)
    g = boundary_vector(space, order)
    m = assemble_load(space, FunctionExpr.x_power(mu), points)
    return B1 - np.outer(m, g)


def _add_outer(out, r, g, rows=2048):
    for k in range(0, r.size, rows):
        out[k : k + rows] += np.outer(r[k : k + rows], g)
    return out


def assemble_system(problem, space, points=DEFAULT_POINTS, lean=False, method="auto"):
    """Assemble ``A``, its parts and (when ``problem.f`` is set) the load vector.

    In lean mode the nonlocal block is accumulated directly into ``A`` and no
    separate copies of ``L`` or ``B`` are kept.
    """
    order = problem.order
    g, r = assemble_rank_one(space, problem.p, order, points)
    rhs = None if problem.f is None else assemble_load(space, problem.f, points)
    if lean:
        A = assemble_nonlocal(space, problem.q, order, points, method)
        add_laplacian(space, A)
        _add_outer(A, r, g)
        return AssembledSystem(A, None, None, g, r, rhs)
    L = assemble_laplacian(space)
    B = assemble_nonlocal(space, problem.q, order, points, method)
    A = L + B + np.outer(r, g)
    return AssembledSystem(A, L, B, g, r, rhs)
