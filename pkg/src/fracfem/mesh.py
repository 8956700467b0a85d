"""Meshes of the unit interval and continuous P1/P2 finite element spaces.

Degrees of freedom live at interior vertices (and, for P2, at element
midpoints). They are numbered left to right; for P2 the midpoint of element
``e`` is dof ``2e`` and interior vertex ``v`` is dof ``2v - 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import InvalidArgumentError, NumericError

VERTEX, MIDPOINT = 0, 1


class Mesh:
    """Partition ``0 = x_0 < x_1 < ... < x_n = 1`` of the unit interval."""

    def __init__(self, nodes):
        nodes = np.array(nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 3:
            raise InvalidArgumentError("a mesh needs at least two elements")
        if nodes[0] != 0.0 or nodes[-1] != 1.0:
            raise InvalidArgumentError("mesh nodes must start at 0 and end at 1")
        if np.any(np.diff(nodes) <= 0):
            raise InvalidArgumentError("mesh nodes must be strictly increasing")
        nodes.setflags(write=False)
        self.nodes = nodes

    @property
    def n(self):
        """Number of elements."""
        return self.nodes.size - 1

    @cached_property
    def h(self):
        h = np.diff(self.nodes)
        h.setflags(write=False)
        return h

    @property
    def hmax(self):
        return float(self.h.max())

    @cached_property
    def is_uniform(self):
        n = self.n
        return bool(np.all(np.abs(self.nodes - np.arange(n + 1) / n) <= 4e-16))

    def locate(self, x, left_limit=False):
        """Element index containing each point.

        With ``left_limit`` a breakpoint belongs to the element on its left,
        otherwise to the element on its right (the last node always maps to
        the last element).
        """
        x = np.asarray(x, dtype=float)
        side = "left" if left_limit else "right"
        e = np.searchsorted(self.nodes, x, side=side) - 1
        return np.clip(e, 0, self.n - 1)

    def __repr__(self):
        return f"Mesh(n={self.n}, uniform={self.is_uniform})"


def make_uniform_mesh(n):
    """Uniform mesh with ``n`` elements of width ``1/n``."""
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"need an integer element count n >= 2, got {n!r}")
    n = int(n)
    return Mesh(np.arange(n + 1) / n)


@dataclass(frozen=True)
class BasisPieces:
    """Piecewise description of the basis derivatives.

    On piece ``p`` of dof ``i`` (the interval ``[a, b]``) the derivative is
    ``c0 + c1 (t - s)`` and the basis function equals ``phi_a`` at ``a``.
    P2 midpoint functions have a single real piece; their second piece is a
    zero-width dummy with vanishing coefficients.
    """

    a: np.ndarray
    b: np.ndarray
    c0: np.ndarray
    c1: np.ndarray
    s: np.ndarray
    phi_a: np.ndarray

    @property
    def lo(self):
        return self.a[:, 0]

    @property
    def hi(self):
        return np.maximum(self.b[:, 0], self.b[:, 1])

    @property
    def far_start(self):
        """Points beyond this lie at least one piece width right of every piece."""
        return np.where(self.b > self.a, 2 * self.b - self.a, -np.inf).max(axis=1)

    def take(self, idx):
        return BasisPieces(*(getattr(self, f)[idx] for f in ("a", "b", "c0", "c1", "s", "phi_a")))

    def values(self, t):
        """Basis function values at points ``t`` lying on each piece, shape (N, 2, m)."""
        s = self.s[..., None]
        a = self.a[..., None]
        return (
            self.phi_a[..., None]
            + self.c0[..., None] * (t - a)
            + 0.5 * self.c1[..., None] * ((t - s) ** 2 - (a - s) ** 2)
        )


class FESpace:
    """Continuous piecewise polynomials of degree 1 or 2 vanishing at 0 and 1."""

    def __init__(self, mesh, degree):
        if degree not in (1, 2):
            raise InvalidArgumentError(f"degree must be 1 or 2, got {degree!r}")
        self.mesh = mesh
        self.degree = degree

    @property
    def dof_count(self):
        n = self.mesh.n
        return n - 1 if self.degree == 1 else 2 * n - 1

    @cached_property
    def kinds(self):
        """VERTEX or MIDPOINT for every dof."""
        if self.degree == 1:
            return np.full(self.dof_count, VERTEX)
        k = np.full(self.dof_count, VERTEX)
        k[0::2] = MIDPOINT
        return k

    @cached_property
    def anchors(self):
        """Vertex index for vertex dofs, element index for midpoint dofs."""
        if self.degree == 1:
            return np.arange(1, self.mesh.n)
        j = np.arange(self.dof_count)
        return np.where(j % 2 == 0, j // 2, (j + 1) // 2)

    @cached_property
    def dof_coords(self):
        x = self.mesh.nodes
        a = self.anchors
        mid = 0.5 * (x[:-1] + x[1:])
        return np.where(self.kinds == VERTEX, x[a], mid[np.minimum(a, self.mesh.n - 1)])

    @cached_property
    def element_dofs(self):
        """Global dof of each local shape function, -1 on boundary vertices.

        Local order is (left vertex, right vertex) for P1 and
        (left vertex, midpoint, right vertex) for P2.
        """
        n = self.mesh.n
        e = np.arange(n)
        if self.degree == 1:
            left, right = e - 1, e
            left[0] = -1
            right[-1] = -1
            return np.stack([left, right], axis=1)
        left, mid, right = 2 * e - 1, 2 * e, 2 * e + 1
        left[0] = -1
        right[-1] = -1
        return np.stack([left, mid, right], axis=1)

    @cached_property
    def pieces(self):
        x, h = self.mesh.nodes, self.mesh.h
        N = self.dof_count
        a = np.zeros((N, 2))
        b = np.zeros((N, 2))
        c0 = np.zeros((N, 2))
        c1 = np.zeros((N, 2))
        s = np.zeros((N, 2))
        phi_a = np.zeros((N, 2))
        vert = self.kinds == VERTEX
        v = self.anchors[vert]
        hl, hr = h[v - 1], h[v]
        a[vert] = np.stack([x[v - 1], x[v]], axis=1)
        b[vert] = np.stack([x[v], x[v + 1]], axis=1)
        s[vert] = x[v][:, None]
        phi_a[vert, 1] = 1.0
        if self.degree == 1:
            c0[vert] = np.stack([1 / hl, -1 / hr], axis=1)
        else:
            c0[vert] = np.stack([3 / hl, -3 / hr], axis=1)
            c1[vert] = np.stack([4 / hl**2, 4 / hr**2], axis=1)
            mid = ~vert
            e = self.anchors[mid]
            he = h[e]
            a[mid, 0], b[mid, 0] = x[e], x[e + 1]
            a[mid, 1] = b[mid, 1] = x[e + 1]
            c1[mid, 0] = -8 / he**2
            s[mid, 0] = 0.5 * (x[e] + x[e + 1])
            s[mid, 1] = x[e + 1]
        return BasisPieces(a, b, c0, c1, s, phi_a)

    def local_shapes(self, tau):
        """Reference shape functions at local coordinates ``tau`` in [0, 1]."""
        tau = np.asarray(tau, dtype=float)
        if self.degree == 1:
            return np.stack([1 - tau, tau])
        return np.stack([(1 - tau) * (1 - 2 * tau), 4 * tau * (1 - tau), tau * (2 * tau - 1)])

    def local_shape_derivs(self, tau):
        """Derivatives with respect to ``tau`` (divide by h for d/dx)."""
        tau = np.asarray(tau, dtype=float)
        if self.degree == 1:
            return np.stack([-np.ones_like(tau), np.ones_like(tau)])
        return np.stack([4 * tau - 3, 4 - 8 * tau, 4 * tau - 1])

    def _check_points(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(~np.isfinite(x)) or np.any(x < 0) or np.any(x > 1):
            raise InvalidArgumentError("evaluation points must lie in [0, 1]")
        return x

    def _check_dof(self, j):
        if not 0 <= j < self.dof_count:
            raise InvalidArgumentError(f"dof index {j} out of range [0, {self.dof_count})")

    def evaluate(self, coeffs, x, derivative=False):
        """Evaluate the FE function with the given coefficients (or its derivative)."""
        x = self._check_points(x)
        coeffs = np.asarray(coeffs)
        if coeffs.shape != (self.dof_count,):
            raise InvalidArgumentError("coefficient vector has the wrong length")
        mesh = self.mesh
        e = mesh.locate(x, left_limit=derivative)
        h = mesh.h[e]
        tau = (x - mesh.nodes[e]) / h
        shapes = self.local_shape_derivs(tau) / h if derivative else self.local_shapes(tau)
        dofs = self.element_dofs[e].T
        c = np.where(dofs >= 0, coeffs[np.maximum(dofs, 0)], 0.0)
        return (c * shapes).sum(axis=0)

    def __repr__(self):
        return f"FESpace(P{self.degree}, n={self.mesh.n}, dofs={self.dof_count})"


def basis_eval(space, j, x):
    """Value of basis function ``j`` at ``x``."""
    space._check_dof(j)
    e = np.zeros(space.dof_count)
    e[j] = 1.0
    return space.evaluate(e, x)


def basis_deriv(space, j, x):
    """Derivative of basis function ``j``; left limit at breakpoints."""
    space._check_dof(j)
    e = np.zeros(space.dof_count)
    e[j] = 1.0
    return space.evaluate(e, x, derivative=True)


def interpolate(space, fn):
    """Nodal interpolant coefficients ``fn(x_j)``."""
    x = space.dof_coords
    try:
        vals = np.asarray(fn(x), dtype=float)
        if vals.shape != x.shape:
            raise ValueError
    except (TypeError, ValueError):
        vals = np.array([fn(float(t)) for t in x], dtype=float)
    if not np.all(np.isfinite(vals)):
        raise NumericError("interpolated function is not finite at every node")
    return vals
