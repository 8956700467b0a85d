"""Riemann-Liouville integrals and derivatives of monomials and FE basis functions.

Every fractional derivative here is the left-sided derivative of order
``2 - alpha`` which, for functions vanishing at 0, equals ``I^gamma`` applied to
the classical derivative, with ``gamma = alpha - 1``.  Basis functions are
piecewise polynomial, so on each piece ``[a, b]`` with derivative
``c0 + c1 (t - s)`` the contribution is

    (c0 + c1 (x - s)) D_g(x; a, b) / Gamma(g + 1)
        - c1 D_{g+1}(x; a, b) / (Gamma(g) (g + 1)),

where ``D_p(x; a, b) = (x - a)_+^p - (x - b)_+^p``.

Far to the right of the support these closed forms cancel badly (the sum of
the pieces decays like ``(x/h)^(gamma - 2)`` while each term is of order one),
so the internal evaluators switch to the integrated-by-parts form

    D phi(x) = (gamma - 1) / Gamma(gamma) * int (x - t)^(gamma - 2) phi(t) dt

whose integrand is smooth and sign-definite on each piece.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .errors import DivergentIntegralError, InvalidArgumentError
from .mesh import MIDPOINT, VERTEX, BasisPieces, FESpace
from .quadrature import gauss_jacobi, gauss_legendre, graded_rule

FAR_POINTS = 12
CHEB_POINTS = 16
NEAR_REACH = 3
_CHUNK = 1 << 22


@dataclass(frozen=True)
class FracOrder:
    """Order ``alpha`` of the fractional operator, with ``gamma = alpha - 1``."""

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not (1.0 < a < 2.0) or not math.isfinite(a):
            raise InvalidArgumentError(f"alpha must lie in (1, 2), got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)

    @property
    def gamma(self):
        return self.alpha - 1.0


def _as_order(order):
    return order if isinstance(order, FracOrder) else FracOrder(order)


def rl_integral_monomial(beta, gamma, x):
    """``(I^gamma t^beta)(x) = Gamma(beta+1)/Gamma(beta+gamma+1) x^(beta+gamma)``."""
    if beta <= -1:
        raise DivergentIntegralError(f"t^{beta} is not integrable at 0")
    if gamma <= 0:
        raise InvalidArgumentError(f"integration order must be positive, got {gamma}")
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise InvalidArgumentError("fractional integrals are only defined for x >= 0")
    c = math.exp(math.lgamma(beta + 1.0) - math.lgamma(beta + gamma + 1.0))
    out = c * x ** (beta + gamma)
    return float(out) if out.ndim == 0 else out


def _pow_diff_width(B, d, p):
    """``(B + d)^p - B^p`` for ``B > 0``, ``d >= 0``, without cancellation."""
    return B**p * np.expm1(p * np.log1p(d / B))


def stable_pow_diff(A, B, gamma):
    """``A^gamma - B^gamma`` for ``A >= B > 0`` via ``expm1``/``log1p``."""
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    if np.any(B <= 0):
        raise InvalidArgumentError("stable_pow_diff needs B > 0; truncate before calling")
    if np.any(A < B):
        raise InvalidArgumentError("stable_pow_diff needs A >= B")
    out = _pow_diff_width(B, A - B, gamma)
    return float(out) if out.ndim == 0 else out


def _trunc_pow_diff(x, a, b, p, use_a=True, use_b=True):
    """``use_a (x - a)_+^p - use_b (x - b)_+^p`` for ``a <= b`` (broadcasting).

    When both bases are active and ``x > b`` the difference is formed from the
    width ``b - a`` so no digits are lost to cancellation.
    """
    u = x - a
    v = x - b
    both = (v > 0) & use_a & use_b
    vs = np.where(both, v, 1.0)
    diff = _pow_diff_width(vs, np.where(both, b - a, 0.0), p)
    up = np.where(u > 0, np.maximum(u, 0.0), 0.0) ** p
    vp = np.where(v > 0, np.maximum(v, 0.0), 0.0) ** p
    single = np.where(use_a, up, 0.0) - np.where(use_b, vp, 0.0)
    return np.where(both, diff, single)


def _closed_form(P, gamma, x, drop_base=None):
    """Closed-form values, shape (K, M), for pieces ``P`` of K functions at points x.

    Terms whose base equals ``drop_base`` are omitted (they are integrated
    separately with a Jacobi weight).
    """
    g1 = math.gamma(gamma + 1.0)
    g2 = math.gamma(gamma) * (gamma + 1.0)
    x = np.asarray(x, dtype=float)[None, :]
    out = np.zeros((P.a.shape[0], x.shape[1]))
    for p in range(P.a.shape[1]):
        a, b = P.a[:, p, None], P.b[:, p, None]
        c0, c1, s = P.c0[:, p, None], P.c1[:, p, None], P.s[:, p, None]
        use_a = True if drop_base is None else a != drop_base
        use_b = True if drop_base is None else b != drop_base
        live = b > a
        d0 = _trunc_pow_diff(x, a, b, gamma, use_a, use_b)
        d1 = _trunc_pow_diff(x, a, b, gamma + 1.0, use_a, use_b)
        term = (c0 + c1 * (x - s)) * d0 / g1 - c1 * d1 / g2
        out += np.where(live, term, 0.0)
    return out


def _singular_part(P, gamma, x, base):
    """Polynomial factor multiplying ``(x - base)^gamma`` in the closed form."""
    g1 = math.gamma(gamma + 1.0)
    g2 = math.gamma(gamma) * (gamma + 1.0)
    x = np.asarray(x, dtype=float)[None, :]
    out = np.zeros((P.a.shape[0], x.shape[1]))
    r = x - base
    for p in range(P.a.shape[1]):
        a, b = P.a[:, p, None], P.b[:, p, None]
        c0, c1, s = P.c0[:, p, None], P.c1[:, p, None], P.s[:, p, None]
        sign = np.where(a == base, 1.0, 0.0) - np.where(b == base, 1.0, 0.0)
        sign = np.where(b > a, sign, 0.0)
        out += sign * ((c0 + c1 * (x - s)) / g1 - c1 * r / g2)
    return out


def _far_field(P, gamma, x):
    """Integrated-by-parts values; valid only where x exceeds the support."""
    rule = gauss_legendre(FAR_POINTS)
    half = 0.5 * (P.b - P.a)
    t = P.a[..., None] + half[..., None] * (rule.nodes + 1.0)
    w = half[..., None] * rule.weights * P.values(t)
    K = P.a.shape[0]
    t = t.reshape(K, -1)
    w = w.reshape(K, -1) * ((gamma - 1.0) / math.gamma(gamma))
    x = np.asarray(x, dtype=float)
    r = x[None, None, :] - t[:, :, None]
    r = np.where(r > 0, r, 1.0)
    return np.einsum("kq,kqm->km", w, r ** (gamma - 2.0))


def eval_pieces(P, gamma, x):
    """Fractional derivative of K piecewise-polynomial functions at points x, shape (K, M).

    Uses the closed form near the support and the by-parts integral at
    distance at least one piece width to its right.
    """
    x = np.asarray(x, dtype=float).ravel()
    K = P.a.shape[0]
    out = np.empty((K, x.size))
    step = max(1, _CHUNK // max(1, x.size * 2 * FAR_POINTS))
    for k0 in range(0, K, step):
        sub = P.take(slice(k0, k0 + step))
        far = x[None, :] >= sub.far_start[:, None]
        val = _closed_form(sub, gamma, x)
        if np.any(far):
            cols = np.any(far, axis=0)
            rows = np.any(far, axis=1)
            ff = _far_field(sub.take(rows), gamma, x[cols])
            blk = val[np.ix_(rows, cols)]
            val[np.ix_(rows, cols)] = np.where(far[np.ix_(rows, cols)], ff, blk)
        out[k0 : k0 + step] = val
    return out


def _check_x(x):
    x = np.asarray(x, dtype=float)
    if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
        raise InvalidArgumentError("evaluation points must lie in [0, 1]")
    return x


def _scalar(out):
    return float(out) if np.ndim(out) == 0 else out


def frac_deriv_p1_basis(mesh, i, order, x):
    """``D^{2-alpha}`` of the P1 hat function at interior node ``i``.

    This is the textbook closed form term by term (each power difference
    through the stable formula); it is kept literal on purpose so tests can
    compare it with the far-field evaluator used internally.
    """
    order = _as_order(order)
    if not 1 <= i <= mesh.n - 1:
        raise InvalidArgumentError(f"node {i} is not an interior node")
    x = _check_x(x)
    g = order.gamma
    xm, xi, xp = mesh.nodes[i - 1 : i + 2]
    hl, hr = xi - xm, xp - xi
    left = _trunc_pow_diff(x, xm, xi, g)
    right = _trunc_pow_diff(x, xi, xp, g)
    return _scalar((left / hl - right / hr) / math.gamma(g + 1.0))


def frac_deriv_p2_basis(mesh, dof, order, x):
    """``D^{2-alpha}`` of a P2 basis function (vertex or midpoint), closed form."""
    order = _as_order(order)
    space = FESpace(mesh, 2)
    space._check_dof(dof)
    x = _check_x(x)
    P = space.pieces.take([dof])
    return _scalar(_closed_form(P, order.gamma, np.atleast_1d(x))[0].reshape(np.shape(x)))


def basis_frac_derivs(space, order, x, dofs=None):
    """Accurate ``D^{2-alpha} phi_j(x)`` for the requested dofs, shape (len(dofs), M)."""
    order = _as_order(order)
    x = _check_x(np.atleast_1d(x))
    P = space.pieces if dofs is None else space.pieces.take(dofs)
    return eval_pieces(P, order.gamma, x)


def frac_deriv_basis_at_one(space, dof, order):
    """``(D^{2-alpha} phi_dof)(1)``."""
    space._check_dof(dof)
    return float(basis_frac_derivs(space, order, [1.0], [dof])[0, 0])


def boundary_vector(space, order):
    """Vector ``g`` with ``g_i = (D^{2-alpha} phi_i)(1)``."""
    return basis_frac_derivs(space, order, [1.0])[:, 0]


def frac_deriv_fefun(space, coeffs, order, x):
    """``(D^{2-alpha} w_h)(x)`` for ``w_h = sum_j coeffs_j phi_j``."""
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.shape != (space.dof_count,):
        raise InvalidArgumentError("coefficient vector has the wrong length")
    order = _as_order(order)
    xa = _check_x(x)
    flat = np.atleast_1d(xa).ravel()
    if space.mesh.is_uniform:
        vals = LatticeEvaluator(space, order, coeffs)(flat)
    else:
        vals = np.zeros(flat.size)
        step = max(1, _CHUNK // max(1, space.dof_count * 8))
        for m0 in range(0, flat.size, step):
            xs = flat[m0 : m0 + step]
            vals[m0 : m0 + step] = coeffs @ eval_pieces(space.pieces, order.gamma, xs)
    return _scalar(vals.reshape(np.shape(xa)))


def unit_pieces(kind, degree, anchors):
    """Pieces of basis functions on the integer lattice (mesh width 1).

    Vertex functions are centred at ``anchors``; midpoint functions live on
    ``[anchor, anchor + 1]``.
    """
    z = np.asarray(anchors, dtype=float)
    K = z.size
    a = np.zeros((K, 2))
    b = np.zeros((K, 2))
    c0 = np.zeros((K, 2))
    c1 = np.zeros((K, 2))
    s = np.zeros((K, 2))
    phi_a = np.zeros((K, 2))
    if kind == VERTEX:
        a[:] = np.stack([z - 1, z], axis=1)
        b[:] = np.stack([z, z + 1], axis=1)
        s[:] = z[:, None]
        phi_a[:, 1] = 1.0
        if degree == 1:
            c0[:] = [1.0, -1.0]
        else:
            c0[:] = [3.0, -3.0]
            c1[:] = [4.0, 4.0]
    elif kind == MIDPOINT and degree == 2:
        a[:, 0], b[:, 0] = z, z + 1
        a[:, 1] = b[:, 1] = z + 1
        c1[:, 0] = -8.0
        s[:, 0] = z + 0.5
        s[:, 1] = z + 1
    else:
        raise InvalidArgumentError("midpoint functions exist only for degree 2")
    return BasisPieces(a, b, c0, c1, s, phi_a)


def unit_kernel(kind, degree, gamma, y):
    """Fractional derivative of the lattice basis function anchored at 0.

    On a uniform mesh of width h, ``D phi_j(x) = h^(gamma - 1) k((x - x_j)/h)``
    where ``x_j`` is the vertex (or the left node of the midpoint's element).
    """
    y = np.asarray(y, dtype=float)
    P = unit_pieces(kind, degree, [0.0])
    return eval_pieces(P, gamma, y.ravel())[0].reshape(y.shape)


def _cheb_nodes(p):
    c = np.arange(p)
    t = 0.5 * (1.0 - np.cos(np.pi * c / (p - 1)))
    w = (-1.0) ** c
    w[0] *= 0.5
    w[-1] *= 0.5
    return t, w


def _barycentric(nodes, weights, values, t):
    """Interpolate rows of ``values`` (M, p) at ``t`` (M,)."""
    diff = t[:, None] - nodes[None, :]
    exact = diff == 0.0
    diff = np.where(exact, 1.0, diff)
    c = weights / diff
    out = (c * values).sum(axis=1) / c.sum(axis=1)
    hit = exact.any(axis=1)
    if np.any(hit):
        out[hit] = values[hit][exact[hit]]
    return out


class LatticeEvaluator:
    """Fast evaluation of ``D^{2-alpha} w_h`` on a uniform mesh.

    Contributions of dofs at most ``NEAR_REACH`` elements to the left are
    evaluated exactly; the remaining far field is smooth on every element, so
    it is tabulated at Chebyshev points per element (one discrete convolution
    per point) and interpolated.
    """

    def __init__(self, space, order, coeffs):
        if not space.mesh.is_uniform:
            raise InvalidArgumentError("LatticeEvaluator needs a uniform mesh")
        order = _as_order(order)
        self.space = space
        self.gamma = order.gamma
        n = space.mesh.n
        self.n = n
        self.h = 1.0 / n
        coeffs = np.asarray(coeffs, dtype=float)
        kinds = [VERTEX] if space.degree == 1 else [VERTEX, MIDPOINT]
        self.coef = {}
        for kind in kinds:
            c = np.zeros(n + 1)
            sel = space.kinds == kind
            c[space.anchors[sel]] = coeffs[sel]
            self.coef[kind] = c
        self.tau, self.bw = _cheb_nodes(CHEB_POINTS)
        self.far = np.zeros((n, CHEB_POINTS))
        d = np.arange(NEAR_REACH + 1, n + 1)
        if d.size:
            for kind, c in self.coef.items():
                y = (d[:, None] + self.tau[None, :]).ravel()
                ker = unit_kernel(kind, space.degree, self.gamma, y).reshape(d.size, -1)
                full = np.zeros((n + 1, CHEB_POINTS))
                full[d] = ker
                for j in range(CHEB_POINTS):
                    self.far[:, j] += fftconvolve(c, full[:, j])[:n]
        # no dof lies in the far field of the first elements; clear FFT round-off there
        self.far[: NEAR_REACH + 1] = 0.0

    def __call__(self, x):
        x = _check_x(x)
        shape = x.shape
        x = np.atleast_1d(x).ravel()
        y = x * self.n
        k = np.clip(np.floor(y).astype(int), 0, self.n - 1)
        tau = y - k
        val = _barycentric(self.tau, self.bw, self.far[k], tau)
        deg = self.space.degree
        for kind, c in self.coef.items():
            lo = -1 if kind == VERTEX else 0
            for d in range(lo, NEAR_REACH + 1):
                a = k - d
                ok = (a >= 0) & (a <= self.n)
                ca = np.where(ok, c[np.clip(a, 0, self.n)], 0.0)
                if np.any(ca != 0):
                    val += ca * unit_kernel(kind, deg, self.gamma, d + tau)
        return _scalar((val * self.h ** (self.gamma - 1.0)).reshape(shape))


def element_integrals(P, gamma, xl, xr, weight_fn, points=12):
    """``int_{xl}^{xr} D phi_k(x) g_m(x) dx`` for K functions and M weights, shape (K, M).

    ``weight_fn(x)`` returns an (M, len(x)) array of smooth test weights.
    Functions whose support starts at or after ``xr`` give zero rows. Near
    the support the terms carrying ``(x - xl)^gamma`` are integrated with a
    Gauss-Jacobi rule and the rest with Gauss-Legendre; far away the by-parts
    values are smooth and Gauss-Legendre suffices.  When a kink of some
    ``D phi_k`` lies to the left of ``xl`` at a distance smaller than the
    element width, the Legendre part is graded geometrically toward ``xl``.
    """
    K = P.a.shape[0]
    active = P.lo < xr
    bases = np.concatenate([P.a[active].ravel(), P.b[active].ravel()])
    bases = bases[bases < xl]
    xs, ws = gauss_legendre(points).mapped(xl, xr)
    if bases.size:
        levels = int(np.ceil(np.log2((xr - xl) / (xl - bases.max()))))
        if levels > 0:
            xs, ws = graded_rule(xl, xr, min(levels, 40), points)
    gw = weight_fn(xs) * ws
    out = np.zeros((K, gw.shape[0]))
    far = active & (xl >= P.far_start)
    near = active & ~far
    if np.any(far):
        idx = np.flatnonzero(far)
        out[idx] = _far_field(P.take(idx), gamma, xs) @ gw.T
    if np.any(near):
        idx = np.flatnonzero(near)
        sub = P.take(idx)
        xj, wj = gauss_jacobi(points, 0.0, gamma).mapped(xl, xr)
        smooth = _closed_form(sub, gamma, xs, drop_base=xl) @ gw.T
        sing = _singular_part(sub, gamma, xj, xl) @ (weight_fn(xj) * wj).T
        out[idx] = smooth + sing
    return out
