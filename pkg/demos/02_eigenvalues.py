"""Eigenvalues of the fractional Sturm-Liouville problem.

Run with ``python3 demos/02_eigenvalues.py``.  Takes about half a minute.
"""

# %%
# -D^alpha u + q u = lambda u with zero boundary values.  The operator is not
# self-adjoint, so the discrete pencil is non-symmetric; for alpha close to 2
# the low eigenvalues are real and approach (k pi)^2, while for smaller alpha
# they pair up into complex conjugates.

import numpy as np

from fracfem import FESpace, ProblemSpec, make_uniform_mesh, solve_fslp

space = FESpace(make_uniform_mesh(160), 2)
for alpha in (1.95, 1.75, 1.55, 1.25):
    pairs = solve_fslp(ProblemSpec(alpha, "alpha-1", q=0.0), space, count=4)
    shown = ", ".join(f"{p.lam.real:.4f}" + (f"{p.lam.imag:+.4f}i" if not p.is_real else "") for p in pairs)
    print(f"alpha={alpha}: {shown}")
print("(k pi)^2:", ", ".join(f"{(k * np.pi) ** 2:.4f}" for k in range(1, 5)))

# %%
# Eigenvalue convergence under refinement, measured against a fine P2 run.

from fracfem import run_eigen_study

rep = run_eigen_study(1.75, "alpha-1", degree=1, levels=[1, 2, 3, 4], count=3, funcs=1, ref_elements=640)
for k, (errs, rates) in enumerate(zip(rep.lam_errors, rep.lam_rates()), start=1):
    print(f"lambda{k} errors:", " ".join(f"{e:.2e}" for e in errs), "rates:", " ".join(f"{r:.2f}" for r in rates))
