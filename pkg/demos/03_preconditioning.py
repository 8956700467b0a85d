"""Condition numbers with and without a Laplacian preconditioner.

Run with ``python3 demos/03_preconditioning.py``.
"""

# %%
# The stiffness matrix A of the w-problem behaves like a discrete Laplacian
# plus a nonlocal part, so kappa(A) grows like h^-2.  Preconditioning with the
# Laplacian L removes that growth when alpha is close to 2 and mu = alpha-1.
# For smaller alpha, or a larger mu, the nonlocal part is no longer a small
# perturbation and kappa(L^-1 A) grows as well, although more slowly.

from fracfem import run_condition_study

for alpha, mu in ((1.95, "alpha-1"), (1.55, "alpha-1"), (1.55, 3.0)):
    rep = run_condition_study(alpha, mu, levels=range(3, 9), q="x")
    print(f"alpha={alpha} mu={mu}")
    print("  kappa(A)      :", " ".join(f"{v:.2e}" for v in rep.unpreconditioned))
    print("  kappa(L^-1 A) :", " ".join(f"{v:.2e}" for v in rep.preconditioned))
    print("  growth of kappa(A) per halving:", " ".join(f"{g:.2f}" for g in rep.growth()))
