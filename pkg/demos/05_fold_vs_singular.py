"""
Where the singular solution sits on the branch
==============================================

For the 3D model the minimal branch does not end at the singular solution.
It turns at a fold lam_fold ~ 1.2988, then oscillates about the singular
voltage lam_s = 10/9 while u(0) -> 1.  Bisection finds the fold; shooting
finds lam_s.  The two agree only when the branch is monotone up to touchdown.

Independent check of the fold: with y = 1 - u, Delta y = lam / y^2.  Scaling
y = c Y(k r), Y(0) = 1 gives lam(k) = k^2 / Y(k)^3; its maximum is the fold and
its oscillation around 10/9 is visible directly.
"""
from _common import OUT

import matplotlib.pyplot as plt
import numpy as np
from scipy.integrate import solve_ivp

from touchdown import MemsPower, PowerMonomial, Problem, WeightedPower, graded_grid
from touchdown.pullin import bisect_pullin
from touchdown.shooter import shoot_backward

prob = Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 1.0))
est = bisect_pullin(prob, width=1e-4, grid=graded_grid(2048, 2.0))
lam_s = shoot_backward(prob).lambda_star
print(f"bisection bracket [{est.bracket_lo:.5f}, {est.bracket_hi:.5f}], shooting lam_s = {lam_s:.6f}")

#%% full branch from the scaled initial-value problem
s0 = 1e-4
sol = solve_ivp(lambda s, y: [y[1], 1 / y[0] ** 2 - 2 * y[1] / s], (s0, 1e4),
                [1 + s0**2 / 6, s0 / 3], method="DOP853", rtol=1e-12, atol=1e-14, dense_output=True)
k = np.geomspace(1e-2, 1e4, 4000)
Y = sol.sol(k)[0]
lam = k**2 / Y**3
u0 = 1 - 1 / Y
print(f"fold from the scaled ODE: {lam.max():.6f}")

fig, ax = plt.subplots(figsize=(5, 3.5))
ax.plot(lam, u0, lw=1.2)
ax.axvline(lam_s, color="C2", ls=":", label=f"shooting lam_s = {lam_s:.4f}")
ax.axvline(est.midpoint, color="C3", ls="--", lw=0.8, label=f"bisection ~ {est.midpoint:.4f}")
ax.set_xlabel("lambda")
ax.set_ylabel("u(0)")
ax.legend(fontsize=8)
fig.tight_layout()
fig.savefig(OUT / "05_fold.png", dpi=120)
