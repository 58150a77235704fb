"""
Other operators
===============

The bounds and the bisection only need a monotone kernel phi(r, v) and a
polynomial majorant, so they run unchanged on a sum of monomials, a
variable-exponent p(r)-Laplacian and the Laplacian on a spherical cap.
"""
import numpy as np

from touchdown import (MemsPower, MonomialSum, PowerMonomial, Problem, SphereCap, VariableExponent,
                       WeightedPower, graded_grid)
from touchdown.config import Polynomial
from touchdown.models import DirectSource, validate_hypotheses
from touchdown.pullin import bisect_pullin

grid = graded_grid(1024, 2.0)
gap = MemsPower(2.0)
models = {
    "r^2 v": Problem(PowerMonomial(2.0, 0.0), gap, WeightedPower(2.0, 1.0)),
    "r^2 v + r^2.5 |v|^.5 v": Problem(MonomialSum(((2.0, 0.0), (2.5, 0.5))), gap, WeightedPower(2.0, 1.0)),
    "p(r) = 2.2 + 0.6 r, N = 3": Problem(VariableExponent(3.0, Polynomial((2.2, 0.6))), gap,
                                         WeightedPower(2.5, 1.0)),
    "sphere cap, N = 3": Problem(SphereCap(3, 1.0), gap,
                                 DirectSource(lambda r: np.sin(np.asarray(r)) ** 2)),
}

for name, prob in models.items():
    rep = validate_hypotheses(prob.operator, prob.gap, prob.source)
    est = bisect_pullin(prob, width=1e-3, grid=grid)
    print(f"{name:28s} hypotheses {'ok' if rep.ok else 'FAIL'}  "
          f"bounds [{est.lower:.4g}, {est.upper:.4g}]  bracket [{est.bracket_lo:.5f}, {est.bracket_hi:.5f}]")
