"""
The singular (touchdown) solution by backward shooting
======================================================

In logarithmic time t = ln(c / r) the touchdown profile starts on a known
power law as t -> infinity.  Integrating back to the first zero of v gives
T* and lam* = exp(-theta T*).  For g = (1-u)^2 and h = 1 the power law is
exact: u*(r) = 1 - r^(2/3), lam* = 10/9.
"""
from _common import OUT

import matplotlib.pyplot as plt
import numpy as np

from touchdown import MemsPower, PowerMonomial, Problem, WeightedPower, graded_grid
from touchdown.asymptotics import fit_asymptotics
from touchdown.shooter import ShooterConfig, shoot_backward

prob = Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 1.0))
grid = graded_grid(2048, 2.0)

res = shoot_backward(prob, ShooterConfig(T=40.0), grid=grid)
c = res.constants
print(f"theta = {c.theta:g}, sigma = {c.sigma:.6f}, kappa = {c.kappa:.6f}")
print(f"T* = {res.t_star:.12f}, lam* = {res.lambda_star:.12f}  (10/9 = {10 / 9:.12f})")

#%% leading law near the singularity
prof = res.touchdown_profile
fit = fit_asymptotics(prof)
print(f"fit on [1e-4, 1e-2]: exponent {fit.exponent:.8f} (law {c.exponent:.8f}), "
      f"coefficient {fit.coef:.8f} (law {c.coef(res.lambda_star):.8f})")

#%% a gap whose ansatz is only asymptotic: g = (1-u)^2 (2-u)/2
from touchdown.models import CustomGap  # noqa: E402

gap2 = CustomGap(lambda u: (1 - u) ** 2 * (2 - u) / 2, lambda u: -(1 - u) * (5 - 3 * u) / 2,
                 A=np.sqrt(2.0), q=0.5)
prob2 = Problem(prob.operator, gap2, prob.source)
for dt in (0.04, 0.02, 0.01):
    print(f"dt = {dt:5.3f}: T* = {shoot_backward(prob2, ShooterConfig(dt=dt)).t_star:.14f}")

r = grid.nodes
fig, ax = plt.subplots(figsize=(5, 3.5))
ax.loglog(r, 1 - prof.u, label="1 - u* (shooting)")
ax.loglog(r, c.coef(res.lambda_star) * r ** c.exponent, "--", label="r^(2/3)")
ax.set_xlabel("r")
ax.set_ylabel("1 - u")
ax.legend()
fig.tight_layout()
fig.savefig(OUT / "04_touchdown.png", dpi=120)
