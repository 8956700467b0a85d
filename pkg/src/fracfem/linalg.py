"""Dense linear algebra: LU solves, eigenvalues, shift-invert subspace iteration, 2-norm condition numbers.

LU, dense eigenvalues and singular values are delegated to LAPACK through
``scipy.linalg``; the shift-invert iteration, the ordering and normalisation
conventions and the error reporting live here.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import ConvergenceError, InvalidArgumentError, SingularMatrixError

DENSE_EIG_LIMIT = 3000
MAX_SUBSPACE_COUNT = 16
STALL_RESIDUAL = 1e-10
STALL_CHANGE = 1e-14


@dataclass(frozen=True)
class LUFactors:
    """Combined L/U storage and LAPACK pivot indices (``P A = L U``)."""

    lu: np.ndarray
    piv: np.ndarray

    @property
    def n(self):
        return self.lu.shape[0]


def _square(A, what="matrix"):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise InvalidArgumentError(f"{what} must be square, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InvalidArgumentError(f"{what} has non-finite entries")
    return A


def lu_factor(A, overwrite=False):
    """LU factorisation with partial pivoting.

    Raises SingularMatrixError when a pivot is exactly zero.
    """
    A = _square(A)
    with warnings.catch_warnings():
        # a zero pivot is reported below as SingularMatrixError
        warnings.simplefilter("ignore", sla.LinAlgWarning)
        lu, piv = sla.lu_factor(A, overwrite_a=overwrite, check_finite=False)
    d = np.abs(np.diag(lu))
    if np.any(d == 0.0):
        k = int(np.argmin(d))
        raise SingularMatrixError(f"matrix is singular (zero pivot in column {k})")
    return LUFactors(lu, piv)


def lu_solve(factors, b):
    b = np.asarray(b)
    if b.shape[0] != factors.n:
        raise InvalidArgumentError("right-hand side has the wrong length")
    return sla.lu_solve((factors.lu, factors.piv), b, check_finite=False)


def solve(A, b):
    return lu_solve(lu_factor(A), b)


def sort_eigenvalues(lam):
    """Indices ordering eigenvalues by |lambda|, ties by imaginary part.

    Moduli are compared to 12 significant digits so that the two members of
    a conjugate pair count as tied despite round-off.
    """
    lam = np.asarray(lam, dtype=complex)
    mod = np.abs(lam)
    top = mod.max() if mod.size else 0.0
    key = np.round(mod / top, 12) if top > 0 else mod
    return np.lexsort((lam.imag, key))


def normalize_vector(v):
    """Unit 2-norm, first nonzero component real and positive."""
    v = np.asarray(v)
    v = v / np.linalg.norm(v)
    nz = np.flatnonzero(np.abs(v) > 1e-14 * np.abs(v).max())
    lead = v[nz[0]]
    v = v * (np.conj(lead) / abs(lead))
    if np.iscomplexobj(v) and np.all(np.abs(v.imag) <= 1e-14):
        v = v.real.copy()
    return v


def eig_dense(A, M=None, vectors=False):
    """All eigenvalues of ``A`` (or of the pencil ``A - lambda M``), sorted by modulus.

    With ``vectors`` the normalised eigenvectors are returned as columns too.
    """
    A = _square(A)
    if A.shape[0] > DENSE_EIG_LIMIT:
        raise InvalidArgumentError(f"dense eigensolver limited to n <= {DENSE_EIG_LIMIT}")
    if M is not None:
        M = _square(M, "mass matrix")
    try:
        if vectors:
            lam, V = sla.eig(A, M, check_finite=False)
        else:
            lam = sla.eigvals(A, M, check_finite=False)
    except sla.LinAlgError as exc:
        raise ConvergenceError(f"QR iteration did not converge: {exc}") from exc
    if not np.all(np.isfinite(lam)):
        raise SingularMatrixError("pencil has infinite eigenvalues (singular mass matrix)")
    idx = sort_eigenvalues(lam)
    lam = lam[idx]
    if not vectors:
        return lam
    V = V[:, idx]
    V = np.stack([normalize_vector(V[:, k]) for k in range(V.shape[1])], axis=1)
    return lam, V


def start_block(N, p):
    """Deterministic start vectors ``v_jk = sin(j k pi / (N + 1))``."""
    j = np.arange(1, N + 1)[:, None]
    k = np.arange(1, p + 1)[None, :]
    return np.sin(j * k * np.pi / (N + 1))


def shift_invert_eigs(A, M, count, shift=0.0, tol=1e-13, maxiter=500):
    """The ``count`` eigenpairs of ``A w = lambda M w`` closest to ``shift``.

    Block inverse iteration on ``(A - shift M)^{-1} M`` with QR
    re-orthogonalisation and a Rayleigh-Ritz step each sweep.  Returns
    ``(lam, W)`` sorted like :func:`eig_dense`.

    The pencils met here are far from normal, so a small scaled residual
    does not yet pin the Ritz values down (at ``1e-10`` the eighth FSLP
    eigenvalue can still move by ``1e-6`` relative).  Iteration therefore
    continues until the residual reaches ``tol`` or, once it is below
    ``STALL_RESIDUAL``, until the Ritz values stop changing.
    """
    A = _square(A)
    M = _square(M, "mass matrix")
    N = A.shape[0]
    if not 1 <= count <= MAX_SUBSPACE_COUNT:
        raise InvalidArgumentError(f"count must be in [1, {MAX_SUBSPACE_COUNT}]")
    p = min(N, 2 * count + 8)
    if p < count:
        raise InvalidArgumentError("problem too small for the requested count")
    fac = lu_factor(A - shift * M)
    normA = np.linalg.norm(A, 1)
    normM = np.linalg.norm(M, 1)
    Q, _ = np.linalg.qr(start_block(N, p))
    history = []
    prev = None
    for it in range(maxiter):
        KQ = lu_solve(fac, M @ Q)
        H = Q.T @ KQ
        theta, Y = np.linalg.eig(H)
        order = np.argsort(-np.abs(theta))[:count]
        theta, Y = theta[order], Y[:, order]
        if np.any(theta == 0):
            raise ConvergenceError("Ritz values vanished; the shift may be an eigenvalue of M")
        lam = shift + 1.0 / theta
        W = Q @ Y
        res = np.linalg.norm(A @ W - (M @ W) * lam, axis=0)
        scale = (normA + np.abs(lam) * normM) * np.linalg.norm(W, axis=0)
        rel = res / scale
        history.append(float(rel.max()))
        settled = prev is not None and np.all(np.abs(lam - prev) <= STALL_CHANGE * np.abs(lam))
        if rel.max() <= tol or (rel.max() <= STALL_RESIDUAL and settled):
            break
        prev = lam
        Q, _ = np.linalg.qr(KQ)
    else:
        raise ConvergenceError(
            f"subspace iteration stalled after {maxiter} sweeps; "
            f"worst relative residuals (last five sweeps) {history[-5:]}"
        )
    idx = sort_eigenvalues(lam)
    lam = lam[idx]
    W = np.stack([normalize_vector(W[:, k]) for k in idx], axis=1)
    if np.all(lam.imag == 0):
        lam = lam.real
    return lam, W


def singular_values(A):
    A = np.asarray(A, dtype=float)
    return sla.svdvals(A, check_finite=False)


def cond2(A):
    """2-norm condition number ``sigma_max / sigma_min`` (``inf`` when singular)."""
    A = _square(A)
    if A.shape[0] > DENSE_EIG_LIMIT:
        raise InvalidArgumentError(f"cond2 limited to n <= {DENSE_EIG_LIMIT}")
    s = singular_values(A)
    if s[-1] == 0.0 or s[-1] <= s[0] * np.finfo(float).eps * 0.5:
        return float("inf")
    return float(s[0] / s[-1])
