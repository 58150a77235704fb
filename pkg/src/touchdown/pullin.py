"""Pull-in voltage: analytic bounds, bisection on solvability, branch sweeps."""
from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate, optimize

from .models import Majorant, Problem, QuadratureError
from .quadrature import RadialGrid, graded_grid
from .solver import SolutionGrid, Status, solve_from_subsolution

log = logging.getLogger(__name__)


class InconsistentBracket(RuntimeError):
    """Solvability classifications contradict monotone existence in lambda."""


@dataclass
class PullInEstimate:
    lower: float
    upper: float
    bracket_lo: float
    bracket_hi: float
    evaluations: int
    low_confidence: bool = False
    trace: list = field(default_factory=list)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.bracket_lo + self.bracket_hi)

    def as_dict(self):
        return {"lower": self.lower, "upper": self.upper, "bracket_lo": self.bracket_lo,
                "bracket_hi": self.bracket_hi, "midpoint": self.midpoint,
                "evaluations": self.evaluations, "low_confidence": self.low_confidence}


@dataclass
class BranchPoint:
    lam: float
    u0: float
    norm_sup: float
    status: Status


# ----------------------------------------------------------------------------
# analytic bounds
# ----------------------------------------------------------------------------

def pde_pair(maj: Majorant, r: float) -> tuple[float, float]:
    """(max, min) of r**(1/d) and r**(1/e)."""
    a, b = r ** (1.0 / maj.d), r ** (1.0 / maj.e)
    return max(a, b), min(a, b)


def pde_min_inverse(maj: Majorant, y: float) -> float:
    """Inverse of r -> min(r**(1/d), r**(1/e)), which is max(y**d, y**e)."""
    return max(y**maj.d, y**maj.e)


def upper_bound(problem: Problem, maj: Majorant | None = None) -> float:
    maj = maj or problem.operator.majorant()
    F_half = float(problem.source.F(0.5))
    if F_half <= 0:
        raise ValueError("F(1/2) = 0: the source vanishes near the origin")
    P1 = float(sum(maj.coefficients))
    big_a = pde_pair(maj, P1 * maj.a_sup)[0]
    big_g = pde_pair(maj, float(problem.gap.g(0.0)))[0]
    return pde_min_inverse(maj, 2.0 * big_a * big_g / pde_pair(maj, F_half)[1])


def phi_integral(problem: Problem, lam: float) -> float:
    """Phi(lam) = int_0^1 phi^{-1}(s, lam F(s)) ds."""
    if lam == 0:
        return 0.0
    op, src = problem.operator, problem.source

    def integrand(s):
        return float(op.inverse(s, lam * src.F(s)))

    val, err = integrate.quad(integrand, 0.0, 1.0, limit=200, epsabs=1e-14, epsrel=1e-12)
    if not math.isfinite(val) or err > 1e-8 * max(1.0, abs(val)):
        raise QuadratureError(f"Phi({lam}) did not converge: {val} +- {err}")
    return val


def phi_integral_inverse(problem: Problem, delta: float) -> float:
    """lam with Phi(lam) = delta, by bracketing and bisection (Phi is increasing)."""
    hi = 1.0
    while phi_integral(problem, hi) < delta:
        hi *= 2.0
        if hi > 1e300:
            raise QuadratureError("Phi stays below delta")
    lo = 0.0 if hi == 1.0 else hi / 2.0
    return optimize.brentq(lambda x: phi_integral(problem, x) - delta, lo, hi, xtol=1e-15, rtol=1e-15)


def lower_bound_witness(problem: Problem) -> tuple[float, float]:
    """Lower bound on the pull-in voltage and the lam0 that attains it."""
    phi1 = phi_integral(problem, 1.0)
    g = problem.gap.g
    if phi1 < 1:
        return float(g(phi1)), 1.0

    def value(delta):
        return phi_integral_inverse(problem, delta) * float(g(delta))

    # coarse pre-scan guards against a non-unimodal profile
    deltas = np.linspace(1e-6, 1 - 1e-6, 64)
    vals = np.array([value(d) for d in deltas])
    k = int(np.argmax(vals))
    lo, hi = deltas[max(k - 1, 0)], deltas[min(k + 1, deltas.size - 1)]
    res = optimize.minimize_scalar(lambda d: -value(d), bounds=(lo, hi), method="bounded",
                                   options={"xatol": 1e-10})
    best = max((vals[k], deltas[k]), (-res.fun, res.x))
    return float(best[0]), phi_integral_inverse(problem, best[1])


def lower_bound(problem: Problem) -> float:
    return lower_bound_witness(problem)[0]


# ----------------------------------------------------------------------------
# bisection and sweeps
# ----------------------------------------------------------------------------

def classify(problem: Problem, lam: float, grid: RadialGrid, **kw) -> tuple[Status, SolutionGrid]:
    sol, rep = solve_from_subsolution(problem, lam, grid, **kw)
    return rep.status, sol


def bisect_pullin(problem: Problem, width: float = 1e-3, lam_init_hi: float = math.inf,
                  grid: RadialGrid | None = None, **solver_kw) -> PullInEstimate:
    """Bracket the solvability threshold between the analytic bounds.

    Converged solves count as existence, touchdown as non-existence.  An
    indeterminate (MaxIterations) outcome is treated as existence and flags
    the estimate as low confidence.
    """
    if width <= 0:
        raise ValueError("width must be positive")
    grid = grid or graded_grid(2048, 2.0)
    lo_b, up_b = lower_bound(problem), upper_bound(problem)
    est = PullInEstimate(lo_b, up_b, lo_b, min(up_b, lam_init_hi), 0)
    if est.bracket_hi - est.bracket_lo <= width:
        return est

    def run(lam):
        status, _ = classify(problem, lam, grid, **solver_kw)
        est.evaluations += 1
        est.trace.append((lam, status.value))
        return status

    if run(est.bracket_lo) is Status.TOUCHDOWN:
        raise InconsistentBracket(f"no solution found at the analytic lower bound {lo_b:g}")
    if run(est.bracket_hi) is not Status.TOUCHDOWN:
        if est.bracket_hi < up_b:
            est.bracket_hi = up_b
            if run(up_b) is not Status.TOUCHDOWN:
                raise InconsistentBracket(f"solution classified at the analytic upper bound {up_b:g}")
        else:
            raise InconsistentBracket(f"solution classified at the analytic upper bound {up_b:g}")

    while est.bracket_hi - est.bracket_lo > width:
        mid = 0.5 * (est.bracket_lo + est.bracket_hi)
        status = run(mid)
        if status is Status.TOUCHDOWN:
            est.bracket_hi = mid
        else:
            if status is Status.MAX_ITER:
                est.low_confidence = True
            est.bracket_lo = mid
    if not est.lower <= est.bracket_lo <= est.bracket_hi <= est.upper:
        raise InconsistentBracket("bracket left the analytic bounds")
    return est


def branch_sweep(problem: Problem, lambdas, grid: RadialGrid | None = None, jobs: int = 1,
                 **solver_kw) -> list[BranchPoint]:
    """Solve from zero at each lambda; results keep the input order."""
    lambdas = [float(x) for x in lambdas]
    if any(b < a for a, b in zip(lambdas, lambdas[1:])) or any(x < 0 for x in lambdas):
        raise ValueError("lambda values must be nonnegative and sorted")
    grid = grid or graded_grid(2048, 2.0)

    def one(lam):
        sol, rep = solve_from_subsolution(problem, lam, grid, **solver_kw)
        return BranchPoint(lam, sol.u0, float(np.max(np.abs(sol.u))), rep.status)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(one, lambdas))
    return [one(x) for x in lambdas]


def refinement_trend(problem: Problem, Ms=(512, 1024, 2048), width: float = 1e-3,
                     grading: float = 2.0, **solver_kw) -> list[tuple[int, float, float]]:
    """(M, bracket_lo, bracket_hi) for a sequence of grids.

    A bracket that stops moving as M grows says the discrete threshold has
    settled; it does not by itself prove it equals the continuum value.
    """
    out = []
    for M in Ms:
        est = bisect_pullin(problem, width=width, grid=graded_grid(int(M), grading), **solver_kw)
        out.append((int(M), est.bracket_lo, est.bracket_hi))
    return out
