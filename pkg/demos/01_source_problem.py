"""Solve a fractional boundary value problem and watch the error shrink.

Run with ``python3 demos/01_source_problem.py``.  Takes a few seconds.
"""

# %%
# The problem is -D^alpha u = f on (0, 1) with u(0) = u(1) = 0, a
# Riemann-Liouville derivative of order 1 < alpha < 2.  The solution carries a
# weak singularity x^(alpha-1) at the origin, which is why plain polynomial
# elements converge slowly.  fracfem solves for a smoother auxiliary function
# w and rebuilds u from it, so the singular part is represented exactly.

import numpy as np

from fracfem import FESpace, ProblemSpec, exact_solution_q0, l2_error, make_uniform_mesh, solve_source
from fracfem.oracle import empirical_rate, theoretical_rate

alpha = 1.55
problem = ProblemSpec(alpha, mu="alpha-1", q=0.0, f="x*(1-x)")

# %%
# With q = 0 the solution is known in closed form, so errors are exact.

u_exact = exact_solution_q0(problem.f, alpha)

for degree in (1, 2):
    errors, hs = [], []
    for m in range(3, 9):
        space = FESpace(make_uniform_mesh(2**m), degree)
        sol = solve_source(problem, space)
        errors.append(l2_error(sol.u, u_exact, alpha, space.mesh.nodes))
        hs.append(2.0**-m)
    rates = empirical_rate(errors, hs)
    print(f"P{degree} errors:", " ".join(f"{e:.2e}" for e in errors))
    print(f"P{degree} rates: ", " ".join(f"{r:.2f}" for r in rates), f"(predicted {theoretical_rate(alpha, degree, problem.mu, True):.2f})")

# %%
# The rebuilt u_h satisfies both boundary conditions to rounding error,
# although only w_h is constrained at the end points.

space = FESpace(make_uniform_mesh(32), 2)
sol = solve_source(problem, space)
print("u_h(0), u_h(1):", sol.u(np.array([0.0, 1.0])))
print("u_h(0.5) vs exact:", float(sol.u(np.array([0.5]))[0]), float(u_exact(0.5)))
