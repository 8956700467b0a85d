"""Source problems, the eigenproblem and the preconditioning study.

The discrete unknown is ``w_h``; the approximation of ``u`` is recovered as

    u_h = D^{2-alpha} w_h - (D^{2-alpha} w_h)(1) x^mu.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import ProblemSpec, assemble_nonlocal, assemble_recon_mass, assemble_system
from .errors import InvalidArgumentError, SingularMatrixError
from .fraccalc import FracOrder, LatticeEvaluator, boundary_vector, frac_deriv_fefun
from .linalg import cond2, eig_dense, lu_factor, lu_solve, shift_invert_eigs
from .mesh import FESpace, make_uniform_mesh
from .quadrature import DEFAULT_POINTS, panel_grid

DENSE_EIG_DOFS = 1000


class SolutionField:
    """``w_h`` on a space, evaluable as ``w_h``, ``D^{2-alpha} w_h`` or ``u_h``."""

    def __init__(self, space, w_coeffs, order, mu, g=None, residual=None):
        self.space = space
        self.w_coeffs = np.asarray(w_coeffs, dtype=float)
        if self.w_coeffs.shape != (space.dof_count,):
            raise InvalidArgumentError("coefficient vector has the wrong length")
        self.order = order if isinstance(order, FracOrder) else FracOrder(order)
        self.mu = float(mu)
        if g is None:
            g = boundary_vector(space, self.order)
        self.boundary_value = float(g @ self.w_coeffs)
        self.residual = residual
        self._lattice = None

    def w(self, x):
        return self.space.evaluate(self.w_coeffs, x)

    def dw(self, x):
        """``(D^{2-alpha} w_h)(x)``."""
        if self.space.mesh.is_uniform:
            if self._lattice is None:
                self._lattice = LatticeEvaluator(self.space, self.order, self.w_coeffs)
            return self._lattice(x)
        return frac_deriv_fefun(self.space, self.w_coeffs, self.order, x)

    def u(self, x):
        return reconstruct(self, x)

    __call__ = u

    def __repr__(self):
        return f"SolutionField({self.space!r}, alpha={self.order.alpha}, mu={self.mu})"


def reconstruct(sol, x):
    """``u_h(x) = D^{2-alpha} w_h(x) - (D^{2-alpha} w_h)(1) x^mu``."""
    x = np.asarray(x, dtype=float)
    out = sol.dw(x) - sol.boundary_value * x**sol.mu
    return float(out) if np.ndim(out) == 0 else out


def solve_source(problem, space, points=DEFAULT_POINTS, lean=False):
    """Galerkin solution of the transformed source problem.

    In lean mode the system matrix is factorised in place (used for large
    reference meshes) and the residual is not recorded.
    """
    if problem.f is None:
        raise InvalidArgumentError("the problem has no source term")
    sys = assemble_system(problem, space, points, lean=lean)
    try:
        fac = lu_factor(sys.A, overwrite=lean)
    except SingularMatrixError as exc:
        raise SingularMatrixError(
            f"discrete system is singular for h={space.mesh.hmax:.3g}, alpha={problem.alpha} "
            "(the mesh may be too coarse)"
        ) from exc
    w = lu_solve(fac, sys.rhs)
    residual = None
    if not lean:
        residual = float(np.abs(sys.A @ w - sys.rhs).max() / max(np.abs(sys.rhs).max(), 1e-300))
    return SolutionField(space, w, problem.order, problem.mu, g=sys.g, residual=residual)


@dataclass
class EigenPair:
    """Eigenvalue, coefficients of ``w_h`` and the L2-normalised ``u_h = S w_h``."""

    lam: complex
    w_coeffs: np.ndarray
    field: SolutionField | None
    is_real: bool
    residual: float
    imag_field: SolutionField | None = field(default=None, repr=False)

    def u(self, x):
        out = self.field.u(x)
        if self.imag_field is not None:
            out = out + 1j * self.imag_field.u(x)
        return out


def _l2_norm(fn, nodes):
    x, w = panel_grid(nodes)
    v = fn(x)
    return math.sqrt(float(w @ (np.abs(v) ** 2)))


def solve_fslp(problem, space, count=8, points=DEFAULT_POINTS, real_tol=1e-8):
    """Eigenpairs of ``A w = lambda M w`` closest to zero, sorted by modulus.

    Small problems use the dense QZ solver; larger ones the shift-invert
    subspace iteration.  Each ``u_h`` is scaled to unit L2 norm with a
    positive value at ``x = h/2``.
    """
    if not 1 <= count <= 16:
        raise InvalidArgumentError("count must be between 1 and 16")
    N = space.dof_count
    if N < 4 * count:
        raise InvalidArgumentError(f"need at least {4 * count} dofs for {count} eigenpairs, have {N}")
    if problem.f is not None:
        problem = ProblemSpec(problem.alpha, problem.mu, problem.q)
    order = problem.order
    sys = assemble_system(problem, space, points)
    B1 = sys.B if problem.q == ProblemSpec(problem.alpha, problem.mu, 1.0).q else None
    if B1 is None:
        B1 = assemble_nonlocal(space, 1.0, order, points)
    M = assemble_recon_mass(space, order, problem.mu, points, B1=B1)
    if N <= DENSE_EIG_DOFS:
        lam, W = eig_dense(sys.A, M, vectors=True)
        lam, W = lam[:count], W[:, :count]
    else:
        lam, W = shift_invert_eigs(sys.A, M, count)
    normA = np.linalg.norm(sys.A, 1)
    normM = np.linalg.norm(M, 1)
    h = space.mesh.h[0]
    pairs = []
    for k in range(count):
        lk = complex(lam[k])
        wk = W[:, k]
        is_real = abs(lk.imag) <= real_tol * abs(lk)
        if is_real:
            lk = complex(lk.real)
            wk = np.real(wk)
        res = np.linalg.norm(sys.A @ wk - lk * (M @ wk)) / ((normA + abs(lk) * normM) * np.linalg.norm(wk))
        re = SolutionField(space, np.real(wk), order, problem.mu, g=sys.g)
        im = None if is_real else SolutionField(space, np.imag(wk), order, problem.mu, g=sys.g)

        def ufun(x, re=re, im=im):
            return re.u(x) if im is None else re.u(x) + 1j * im.u(x)

        norm = _l2_norm(ufun, space.mesh.nodes)
        probe = ufun(np.array([0.5 * h]))[0]
        phase = np.conj(probe) / abs(probe) if probe != 0 else 1.0
        scale = phase / norm
        wk = wk * scale
        if is_real:
            wk = np.real(wk)
        re = SolutionField(space, np.real(wk), order, problem.mu, g=sys.g)
        im = None if is_real else SolutionField(space, np.imag(wk), order, problem.mu, g=sys.g)
        pairs.append(EigenPair(lk.real if is_real else lk, wk, re, is_real, float(res), im))
    return pairs


def condition_numbers(problem, space, points=DEFAULT_POINTS):
    """``(kappa(A), kappa(L^{-1} A))`` with the Laplacian block as preconditioner."""
    sys = assemble_system(problem, space, points)
    kW = cond2(sys.A)
    if np.array_equal(sys.A, sys.L):
        # the preconditioned operator is exactly the identity
        return kW, 1.0
    Z = lu_solve(lu_factor(sys.L), sys.A)
    return kW, cond2(Z)


def condition_study(problem, levels, degree=1, points=DEFAULT_POINTS):
    """Rows ``(m, kappa(A), kappa(L^{-1} A))`` on uniform meshes ``h = 2^-m``."""
    rows = []
    for m in levels:
        space = FESpace(make_uniform_mesh(2**m), degree)
        kW, kP = condition_numbers(problem, space, points)
        rows.append((m, kW, kP))
    return rows
