"""Brute-force oracles built only on scipy.integrate.quad and explicit Lagrange bases.

Nothing here imports the package under test, so agreement is an
independent check of the closed forms and of the assembly.
"""

import math
import warnings

import numpy as np
from scipy.integrate import IntegrationWarning, quad


def frac_integral_bf(g, gamma, x, kinks=()):
    """``(I^gamma g)(x)`` by quadrature after substituting ``v = (x - t)^gamma``.

    The substitution removes the kernel singularity; ``kinks`` are points
    where ``g`` is not smooth and become breakpoints in ``v``.
    """
    if x <= 0:
        return 0.0
    X = x**gamma
    pts = sorted({(x - k) ** gamma for k in kinks if 0 < k < x})
    with warnings.catch_warnings():
        # quad flags round-off once it reaches machine precision; harmless here
        warnings.simplefilter("ignore", IntegrationWarning)
        val, _ = quad(lambda v: g(x - v ** (1.0 / gamma)), 0.0, X, points=pts or None,
                      limit=400, epsabs=1e-16, epsrel=1e-14)
    return val / math.gamma(gamma + 1.0)


class LagrangeBasis:
    """Global continuous P1/P2 basis on arbitrary nodes, dof order matching the package.

    P1: dof ``i`` is the hat at node ``i + 1``.  P2: dof ``2e`` is the bubble
    of element ``e``, dof ``2v - 1`` the vertex function of node ``v``.
    """

    def __init__(self, nodes, degree):
        self.x = np.asarray(nodes, dtype=float)
        self.n = self.x.size - 1
        self.degree = degree
        self.N = self.n - 1 if degree == 1 else 2 * self.n - 1

    def _element_nodes(self, e):
        xl, xr = self.x[e], self.x[e + 1]
        if self.degree == 1:
            return [xl, xr]
        return [xl, 0.5 * (xl + xr), xr]

    def _support(self, i):
        """List of (element, local index) pairs where dof ``i`` lives."""
        if self.degree == 1:
            v = i + 1
            return [(v - 1, 1), (v, 0)]
        if i % 2 == 0:
            return [(i // 2, 1)]
        v = (i + 1) // 2
        return [(v - 1, 2), (v, 0)]

    @staticmethod
    def _lagrange(nodes, k, t, deriv):
        t = np.asarray(t, dtype=float)
        others = [m for m in range(len(nodes)) if m != k]
        if not deriv:
            out = np.ones_like(t)
            for m in others:
                out = out * (t - nodes[m]) / (nodes[k] - nodes[m])
            return out
        out = np.zeros_like(t)
        for m in others:
            term = np.full_like(t, 1.0 / (nodes[k] - nodes[m]))
            for l in others:
                if l != m:
                    term = term * (t - nodes[l]) / (nodes[k] - nodes[l])
            out = out + term
        return out

    def _eval(self, i, t, deriv):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for e, k in self._support(i):
            xl, xr = self.x[e], self.x[e + 1]
            inside = (t > xl) & (t <= xr) if deriv else (t >= xl) & (t <= xr)
            if np.any(inside):
                v = self._lagrange(self._element_nodes(e), k, t, deriv)
                out = np.where(inside, v, out)
        return out

    def phi(self, i, t):
        return self._eval(i, t, False)

    def dphi(self, i, t):
        return self._eval(i, t, True)

    def support(self, i):
        es = [e for e, _ in self._support(i)]
        return self.x[min(es)], self.x[max(es) + 1]

    def linear_pieces(self, i):
        """``phi_i'`` as a list of ``(lo, hi, value at lo, slope)`` in plain floats."""
        out = []
        for e, _ in self._support(i):
            lo, hi = float(self.x[e]), float(self.x[e + 1])
            t1, t3 = lo + 0.25 * (hi - lo), lo + 0.75 * (hi - lo)
            v1, v3 = (float(v) for v in self.dphi(i, np.array([t1, t3])))
            slope = (v3 - v1) / (t3 - t1)
            out.append((lo, hi, v1 - slope * (t1 - lo), slope))
        return out

    def frac_deriv(self, i, alpha, x):
        """``D^{2-alpha} phi_i(x) = I^{alpha-1} phi_i'(x)`` (``phi_i(0) = 0``)."""
        if x <= self.support(i)[0]:
            return 0.0
        pieces = self.linear_pieces(i)

        def g(t):
            for lo, hi, v0, slope in pieces:
                if lo < t <= hi:
                    return v0 + slope * (t - lo)
            return 0.0

        return frac_integral_bf(g, alpha - 1.0, x, kinks=self.x)


def graded_points(nodes, levels=14, points=8):
    """Composite Gauss-Legendre rule, each element graded toward its left end."""
    g, gw = np.polynomial.legendre.leggauss(points)
    xs, ws = [], []
    for lo, hi in zip(nodes[:-1], nodes[1:]):
        d = hi - lo
        edges = lo + d * np.concatenate([[0.0], 2.0 ** -np.arange(levels, -1, -1, dtype=float)])
        for a, b in zip(edges[:-1], edges[1:]):
            xs.append(a + 0.5 * (b - a) * (g + 1))
            ws.append(0.5 * (b - a) * gw)
    return np.concatenate(xs), np.concatenate(ws)


def _levels(alpha):
    # D phi behaves like (x - x_k)^(alpha-1) past each node; weaker powers need deeper grading
    return int(min(50, max(14, 2.0 / (alpha - 1.0))))


def nonlocal_entry_bf(basis, q, alpha, j, i):
    """``B[j, i] = (q D phi_i, phi_j)``, integrated over the support of ``phi_j``."""
    lo, hi = basis.support(j)
    x, w = graded_points(basis.x[(basis.x >= lo) & (basis.x <= hi)], levels=_levels(alpha))
    d = np.array([basis.frac_deriv(i, alpha, t) for t in x])
    return float((w * q(x) * basis.phi(j, x)) @ d)


def nonlocal_matrix_bf(basis, q, alpha):
    """Every entry of the nonlocal block by brute force."""
    x, w = graded_points(basis.x, levels=_levels(alpha))
    D = np.array([[basis.frac_deriv(i, alpha, t) for t in x] for i in range(basis.N)])
    Phi = np.array([basis.phi(j, x) for j in range(basis.N)])
    return (Phi * (w * q(x))) @ D.T


def load_bf(basis, f, kinks=()):
    """``(f, phi_j)`` by adaptive quadrature, split at mesh nodes and ``kinks``."""
    out = np.zeros(basis.N)
    for j in range(basis.N):
        lo, hi = basis.support(j)
        pts = sorted({p for p in list(basis.x) + list(kinks) if lo < p < hi})
        out[j] = quad(lambda t: f(t) * basis.phi(j, t), lo, hi, points=pts or None,
                      limit=400, epsabs=1e-15, epsrel=1e-13)[0]
    return out
