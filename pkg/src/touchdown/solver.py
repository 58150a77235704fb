"""Monotone Picard iteration for the integral form of the problem.

    u(r) = int_r^1 phi^{-1}(t, lam int_0^t f(s)/g(u(s)) ds) dt

Started from the zero subsolution the iterates increase to the smallest
solution; started from a supersolution they decrease.
"""
from __future__ import annotations

import enum
import logging
from dataclasses import dataclass

import numpy as np

from .models import Problem
from .quadrature import RadialGrid, cumulative_values, graded_grid, tail_values

log = logging.getLogger(__name__)

TOL_QUAD = 1e-12
TOL_FIX = 1e-10
TOL_RES = 1e-6
EPS_TD = 1e-6
G_FLOOR = 1e-14
MAX_ITER = 10_000
TD_MARGIN = 1e-3


class GapFloorBreached(ArithmeticError):
    """g(u) fell to the floor somewhere on the grid: the iterate is touching down."""


class NotASupersolution(ValueError):
    pass


class RhoNotBelowOne(ValueError):
    pass


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    TOUCHDOWN = "TouchdownDetected"
    MAX_ITER = "MaxIterations"


@dataclass(frozen=True, eq=False)
class SolutionGrid:
    grid: RadialGrid
    u: np.ndarray
    lam: float

    @property
    def u0(self) -> float:
        """Value at the guard node, the grid's proxy for u(0)."""
        return float(self.u[0])


@dataclass
class IterationReport:
    status: Status
    iterations: int
    final_delta: float
    residual: float

    def as_dict(self):
        return {"status": self.status.value, "iterations": self.iterations,
                "final_delta": self.final_delta, "residual": self.residual}


def zero_solution(grid: RadialGrid, lam: float = 0.0) -> SolutionGrid:
    return SolutionGrid(grid, np.zeros(grid.size), lam)


def _source_values(problem: Problem, grid: RadialGrid) -> np.ndarray:
    return np.asarray(problem.source.f(grid.nodes), float)


def _step(problem, lam, grid, fvals, u, g_floor=G_FLOOR):
    if lam == 0:
        return np.zeros_like(u)
    with np.errstate(invalid="ignore"):
        gu = problem.gap.g(u)
    if not np.all(gu > g_floor):
        raise GapFloorBreached(f"g(u) <= {g_floor:g} at {int(np.sum(~(gu > g_floor)))} nodes")
    inner = lam * cumulative_values(grid, fvals / gu)
    v = problem.operator.inverse(grid.nodes, inner)
    return tail_values(grid, v)


def picard_step(problem: Problem, lam: float, u_k: SolutionGrid, g_floor: float = G_FLOOR) -> SolutionGrid:
    """One application of the integral operator; u_{k+1}(1) = 0 by construction."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    grid = u_k.grid
    u = _step(problem, lam, grid, _source_values(problem, grid), u_k.u, g_floor)
    return SolutionGrid(grid, u, lam)


def residual(problem: Problem, lam: float, u: SolutionGrid) -> float:
    """sup over nodes of |u - T(u)|."""
    return float(np.max(np.abs(u.u - picard_step(problem, lam, u).u)))


def _iterate(problem, lam, start, max_iter, tol_fix, eps_td, g_floor, direction):
    grid = start.grid
    fvals = _source_values(problem, grid)
    u = start.u.copy()
    delta = np.inf
    for k in range(1, max_iter + 1):
        try:
            new = _step(problem, lam, grid, fvals, u, g_floor)
        except GapFloorBreached:
            return SolutionGrid(grid, u, lam), IterationReport(Status.TOUCHDOWN, k, delta, np.inf)
        if direction * np.min(direction * (new - u)) < -10 * TOL_QUAD:
            log.warning("monotonicity lost at iteration %d (lambda=%g)", k, lam)
        delta = float(np.max(np.abs(new - u)))
        if new[0] >= 1.0 - eps_td:
            # keep the last iterate that still lies below the plate
            return SolutionGrid(grid, u, lam), IterationReport(Status.TOUCHDOWN, k, delta, np.inf)
        u = new
        if delta <= tol_fix:
            sol = SolutionGrid(grid, u, lam)
            return sol, IterationReport(Status.CONVERGED, k, delta, residual(problem, lam, sol))
    sol = SolutionGrid(grid, u, lam)
    status = Status.TOUCHDOWN if u[0] > 1.0 - TD_MARGIN else Status.MAX_ITER
    try:
        res = residual(problem, lam, sol)
    except GapFloorBreached:
        res = np.inf
    return sol, IterationReport(status, max_iter, delta, res)


def solve_from_subsolution(problem: Problem, lam: float, grid: RadialGrid | None = None,
                           max_iter: int = MAX_ITER, tol_fix: float = TOL_FIX,
                           eps_td: float = EPS_TD, g_floor: float = G_FLOOR,
                           start: SolutionGrid | None = None):
    """Iterate from u = 0 (or from ``start``, which must be a subsolution).

    Returns the last iterate and an :class:`IterationReport`.
    """
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    if grid is None:
        grid = start.grid if start is not None else graded_grid(2048, 2.0)
    if start is None:
        start = zero_solution(grid, lam)
    return _iterate(problem, lam, start, max_iter, tol_fix, eps_td, g_floor, +1)


def solve_from_supersolution(problem: Problem, lam: float, u0: SolutionGrid,
                             max_iter: int = MAX_ITER, tol_fix: float = TOL_FIX,
                             eps_td: float = EPS_TD, g_floor: float = G_FLOOR):
    """Iterate downward from a numerically verified supersolution ``u0``."""
    if lam < 0:
        raise ValueError("lambda must be nonnegative")
    image = picard_step(problem, lam, u0, g_floor)
    gap = float(np.min(u0.u - image.u))
    if gap < -10 * TOL_QUAD:
        raise NotASupersolution(f"u0 - T(u0) reaches {gap:.3e} < 0")
    return _iterate(problem, lam, u0, max_iter, tol_fix, eps_td, g_floor, -1)


def build_small_lambda_supersolution(problem: Problem, lam0: float, grid: RadialGrid | None = None):
    """Supersolution u(r) = int_r^1 phi^{-1}(t, lam0 F(t)) dt.

    Returns ``(u, lam_max)``: u is a supersolution for every lambda up to
    lam_max = lam0 * g(rho), rho = sup u.  F is the grid's own cumulative
    integral of f so the bound also holds for the discrete operator.
    """
    if lam0 <= 0:
        raise ValueError("lam0 must be positive")
    if grid is None:
        grid = graded_grid(2048, 2.0)
    F = cumulative_values(grid, _source_values(problem, grid))
    ubar = tail_values(grid, problem.operator.inverse(grid.nodes, lam0 * F))
    rho = float(ubar[0])
    if rho >= 1:
        raise RhoNotBelowOne(f"rho = {rho:.6g} >= 1 for lam0 = {lam0:g}")
    lam_max = lam0 * float(problem.gap.g(rho))
    return SolutionGrid(grid, ubar, lam_max), lam_max
