"""
Pull-in voltage of the 3D radial MEMS model
===========================================

u solves  -(r^2 u')' = lam r^2 / (1 - u)^2,  u'(0) = 0, u(1) = 0.

Closed-form bounds sandwich the pull-in voltage, then bisection on the
solvability of the monotone iteration tightens the bracket.
"""
from _common import OUT

import matplotlib.pyplot as plt
import numpy as np

from touchdown import MemsPower, PowerMonomial, Problem, WeightedPower, graded_grid
from touchdown.pullin import bisect_pullin, branch_sweep, lower_bound, upper_bound
from touchdown.solver import Status

#%% model and grid
prob = Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 1.0))
grid = graded_grid(2048, 2.0)

#%% bounds: 25/36 below, 48 above
print(f"lower bound {lower_bound(prob):.12f}  (25/36 = {25 / 36:.12f})")
print(f"upper bound {upper_bound(prob):.12f}")

#%% bisection: Converged = solvable, TouchdownDetected = not
est = bisect_pullin(prob, width=1e-4, grid=grid)
print(f"bracket [{est.bracket_lo:.6f}, {est.bracket_hi:.6f}] after {est.evaluations} solves")
for lam, status in est.trace[:6]:
    print(f"   lam = {lam:10.6f}  {status}")

#%% bifurcation diagram along the minimal branch
lams = np.linspace(0.0, 1.02 * est.bracket_hi, 40)
pts = branch_sweep(prob, lams, grid, jobs=4)
ok = np.array([p.status is Status.CONVERGED for p in pts])
u0 = np.array([p.u0 for p in pts])

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(lams[ok], u0[ok], "o-", ms=3)
ax.axvline(est.midpoint, color="C3", ls="--", lw=0.8, label=f"pull-in ~ {est.midpoint:.4f}")
ax.set_xlabel("lambda")
ax.set_ylabel("u(0)")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "01_branch.png", dpi=120)
print("wrote", OUT / "01_branch.png")
