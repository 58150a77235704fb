import math

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from touchdown import MemsPower, PowerMonomial, graded_grid
from touchdown.asymptotics import (AsymptoticConstants, AsymptoticsError, compute_constants,
                                   expansion_eval, fit_asymptotics, identity_residuals)
from touchdown.solver import SolutionGrid


def test_r1_constants():
    c = compute_constants(PowerMonomial(2.0, 0.0), MemsPower(2.0), 1.0, 2.0)
    assert c.theta == 2.0
    assert c.sigma == pytest.approx(2 / 3, rel=1e-15)
    assert c.kappa == pytest.approx(0.9 ** (2 / 3), rel=1e-15)
    assert c.kappa == pytest.approx(0.93217, abs=1e-5)
    assert c.exponent == pytest.approx(2 / 3, rel=1e-15)
    assert c.singular_lambda() == pytest.approx(10 / 9, rel=1e-14)
    assert c.coef(10 / 9) == pytest.approx(1.0, rel=1e-14)


def test_khessian_constants():
    c = compute_constants(PowerMonomial(3.0, 1.0), MemsPower(3.0), 1.0, 4.0)
    assert c.theta == 4.0
    assert c.sigma == pytest.approx(3 / 5, rel=1e-15)
    assert c.singular_lambda() == pytest.approx(208 / 125, rel=1e-13)


@pytest.mark.parametrize("alpha,beta,gamma,p", [(1.0, 0.0, 2.0, 2.0), (2.0, 0.0, 1.0, 2.0),
                                                (2.0, 0.0, 2.0, 1.0), (2.0, -1.0, 2.0, 2.0)])
def test_inadmissible_rejected(alpha, beta, gamma, p):
    with pytest.raises(AsymptoticsError):
        compute_constants(PowerMonomial(alpha, beta), MemsPower(p), 1.0, gamma)


def _random_constants(alpha, beta, gamma, q, A, C):
    theta = gamma + 2 + beta - alpha
    sigma = 1 / ((1 - q) * (beta + 1) + 1)
    room = gamma + 1 - theta * sigma
    kappa = (A / (theta * sigma)) ** ((beta + 1) * sigma) * (C / room) ** sigma
    return AsymptoticConstants(alpha, beta, gamma, A, q, C, theta, sigma, kappa)


@settings(max_examples=100, deadline=None)
@given(beta=st.floats(-0.9, 3.0), da=st.floats(0.05, 3.0), dg=st.floats(0.0, 3.0),
       q=st.floats(0.05, 0.95), A=st.floats(0.1, 10.0), C=st.floats(0.1, 10.0))
def test_identities_hypothesis(beta, da, dg, q, A, C):
    alpha = beta + 1 + da
    const = _random_constants(alpha, beta, alpha + dg, q, A, C)
    assume(const.gamma + 1 - const.theta * const.sigma > 1e-3)
    rel1, rel2 = identity_residuals(const)
    assert rel1 <= 1e-12 and rel2 <= 1e-12


def test_expansion_and_fit_on_exact_law():
    c = compute_constants(PowerMonomial(2.0, 0.0), MemsPower(2.0), 1.0, 2.0)
    g = graded_grid(2048, 2.0)
    u = expansion_eval(c, 10 / 9, g.nodes)
    fit = fit_asymptotics(SolutionGrid(g, u, 10 / 9))
    assert fit.exponent == pytest.approx(2 / 3, rel=1e-10)
    assert fit.coef == pytest.approx(1.0, rel=1e-10)
    assert fit.r2 == pytest.approx(1.0)


def test_fit_needs_nodes():
    g = graded_grid(16, 2.0)
    with pytest.raises(AsymptoticsError):
        fit_asymptotics(SolutionGrid(g, np.zeros(g.size), 1.0))
