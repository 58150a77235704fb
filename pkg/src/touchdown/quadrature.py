"""Graded radial meshes and trapezoid integration operators on them."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Nodes r_0 < r_1 < ... < r_M = 1 graded toward the origin.

    r_i = (i/M)**grading for i >= 1; r_0 = (1/(2M))**grading is a guard node
    standing in for the open endpoint at 0.
    """

    nodes: np.ndarray
    grading: float
    M: int

    @property
    def size(self) -> int:
        return self.nodes.size

    def index(self, r: float) -> int:
        i = int(np.argmin(np.abs(self.nodes - r)))
        if not np.isclose(self.nodes[i], r, rtol=1e-14, atol=0.0):
            raise ValueError(f"{r} is not a grid node")
        return i


@dataclass(frozen=True, eq=False)
class GridFunction:
    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, float)
        if v.shape != self.grid.nodes.shape:
            raise ValueError("values and nodes differ in length")
        object.__setattr__(self, "values", v)


def graded_grid(M: int, grading: float = 2.0) -> RadialGrid:
    if M < 1:
        raise ValueError("need at least one cell")
    if grading < 1:
        raise ValueError("grading exponent must be >= 1")
    i = np.arange(1, M + 1)
    nodes = np.concatenate([[(0.5 / M) ** grading], (i / M) ** grading])
    nodes[-1] = 1.0
    nodes.flags.writeable = False
    return RadialGrid(nodes=nodes, grading=float(grading), M=int(M))


def _cells(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    return 0.5 * np.diff(grid.nodes) * (values[1:] + values[:-1])


def cumulative_values(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    """Array form of :func:`cumulative_integral` (used in the solver hot loop)."""
    out = np.empty_like(values)
    out[0] = grid.nodes[0] * values[0]
    np.cumsum(_cells(grid, values), out=out[1:])
    out[1:] += out[0]
    return out


def tail_values(grid: RadialGrid, values: np.ndarray) -> np.ndarray:
    """Array of int_{r_i}^1 f for every node; exactly 0 at r = 1."""
    out = np.zeros_like(values)
    out[:-1] = np.cumsum(_cells(grid, values)[::-1])[::-1]
    return out


def cumulative_integral(fvals: GridFunction) -> GridFunction:
    """I(r_i) ~ int_0^{r_i} f, composite trapezoid plus r_0 f(r_0) for [0, r_0]."""
    return GridFunction(fvals.grid, cumulative_values(fvals.grid, fvals.values))


def tail_integral(fvals: GridFunction, r: float) -> float:
    """int_r^1 f for a node r.  r = 0 gives the full integral including [0, r_0]."""
    grid = fvals.grid
    tails = tail_values(grid, fvals.values)
    if r == 0:
        return float(tails[0] + grid.nodes[0] * fvals.values[0])
    return float(tails[grid.index(r)])
