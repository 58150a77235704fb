import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from touchdown.quadrature import (GridFunction, cumulative_integral, cumulative_values, graded_grid,
                                  tail_integral, tail_values)


def test_graded_grid_nodes():
    g = graded_grid(4, 2.0)
    assert np.allclose(g.nodes, [1 / 64, 1 / 16, 1 / 4, 9 / 16, 1.0])
    assert g.nodes[-1] == 1.0 and np.all(np.diff(g.nodes) > 0)


def test_constant_integrand_exact():
    g = graded_grid(64, 2.0)
    cum = cumulative_values(g, np.ones(g.size))
    assert np.allclose(cum, g.nodes, rtol=1e-14)
    assert tail_values(g, np.ones(g.size))[-1] == 0.0


def test_linear_integrand_examples():
    g = graded_grid(4, 1.0)
    gf = GridFunction(g, g.nodes.copy())
    assert cumulative_integral(gf).values[-1] == pytest.approx(0.5, abs=1e-2)
    assert tail_integral(gf, 1.0) == 0.0


@pytest.mark.parametrize("fun,exact", [(lambda s: s**2, 1 / 3), (np.sin, 1 - np.cos(1.0))])
def test_second_order(fun, exact):
    errs = []
    for M in (128, 256, 512, 1024):
        g = graded_grid(M, 1.0)
        errs.append(abs(cumulative_values(g, fun(g.nodes))[-1] - exact))
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders > 1.9), orders


@settings(max_examples=30, deadline=None)
@given(M=st.integers(16, 400), k=st.integers(1, 399))
def test_additivity(M, k):
    g = graded_grid(M, 2.0)
    k = min(k, M - 1)
    f = np.cos(3 * g.nodes) + 2
    gf = GridFunction(g, f)
    total = tail_integral(gf, 0.0)
    left = cumulative_values(g, f)[k + 0]
    assert left + tail_integral(gf, g.nodes[k]) == pytest.approx(total, rel=1e-13)


@settings(max_examples=30, deadline=None)
@given(M=st.integers(16, 300), sigma=st.floats(1.0, 4.0))
def test_cumulative_monotone_for_positive(M, sigma):
    g = graded_grid(M, sigma)
    cum = cumulative_values(g, 1 + g.nodes)
    assert np.all(np.diff(cum) > 0)
