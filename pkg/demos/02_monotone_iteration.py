"""
Monotone iteration from both sides
==================================

Starting from u = 0 the Picard iterates climb; starting from the explicit
small-voltage supersolution they descend.  Below the bound both meet at
the minimal solution.
"""
from _common import OUT

import matplotlib.pyplot as plt
import numpy as np

from touchdown import MemsPower, PowerMonomial, Problem, WeightedPower, graded_grid
from touchdown.pullin import lower_bound_witness
from touchdown.solver import (build_small_lambda_supersolution, picard_step, residual,
                              solve_from_subsolution, zero_solution)

prob = Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 1.0))
grid = graded_grid(1024, 2.0)

bound, lam0 = lower_bound_witness(prob)
sup, lam_max = build_small_lambda_supersolution(prob, lam0, grid)
lam = 0.9 * lam_max
print(f"lower bound {bound:.6f}; supersolution built at lam0 = {lam0:.4f} covers lam <= {lam_max:.6f}")

#%% ten sweeps from each side
up, down = zero_solution(grid, lam), sup
ups, downs = [up.u0], [down.u0]
for _ in range(10):
    up, down = picard_step(prob, lam, up), picard_step(prob, lam, down)
    ups.append(up.u0)
    downs.append(down.u0)
print("u0 from below:", np.round(ups, 6))
print("u0 from above:", np.round(downs, 6))

#%% converged
sol, rep = solve_from_subsolution(prob, lam, grid)
print(f"{rep.status.value} after {rep.iterations} iterations, residual {residual(prob, lam, sol):.2e}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(ups, "o-", ms=3, label="from 0")
ax.plot(downs, "s-", ms=3, label="from supersolution")
ax.axhline(sol.u0, color="k", lw=0.6)
ax.set_xlabel("iteration")
ax.set_ylabel("u(0)")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "02_iterates.png", dpi=120)
