import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from touchdown import MemsPower, PowerMonomial, Problem, SphereCap, WeightedPower, graded_grid
from touchdown.models import DirectSource, Majorant
from touchdown.pullin import (InconsistentBracket, bisect_pullin, branch_sweep, lower_bound,
                              lower_bound_witness, pde_min_inverse, pde_pair, phi_integral,
                              phi_integral_inverse, upper_bound)
from touchdown.solver import Status


def test_r1_bounds(r1):
    assert lower_bound(r1) == pytest.approx(float(Fraction(25, 36)), rel=1e-12)
    assert upper_bound(r1) == pytest.approx(48.0, rel=1e-12)


def test_r1_phi_closed_form(r1):
    # Phi(lam) = lam / 6
    for lam in (0.3, 1.0, 4.0):
        assert phi_integral(r1, lam) == pytest.approx(lam / 6, rel=1e-12)
    assert phi_integral_inverse(r1, 0.25) == pytest.approx(1.5, rel=1e-12)


def test_lower_bound_sup_branch():
    # Phi(1) >= 1 forces the sup over delta; Phi(lam) = lam/6 * 10 here
    prob = Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 10.0))
    bound, lam0 = lower_bound_witness(prob)
    # sup_delta 0.6 delta (1-delta)^2 at delta = 1/3
    assert bound == pytest.approx(0.6 * (1 / 3) * (2 / 3) ** 2 / (1 / 6) * (1 / 6), rel=1e-7)
    assert lam0 == pytest.approx(0.2, rel=1e-6)


def test_upper_bound_scales_with_g0():
    class Gap4(MemsPower):
        def g(self, u):
            return 4.0 * super().g(u)
    prob = Problem(PowerMonomial(2.0, 0.0), Gap4(2.0), WeightedPower(2.0, 1.0))
    assert upper_bound(prob) == pytest.approx(192.0, rel=1e-12)


@settings(max_examples=80, deadline=None)
@given(d=st.floats(0.2, 5.0), e=st.floats(0.2, 5.0), y=st.floats(1e-3, 1e3))
def test_pde_min_inverse(d, e, y):
    maj = Majorant(coefficients=(1.0, 1.0), exponents=(d, e), a=lambda r: r)
    x = pde_min_inverse(maj, y)
    assert pde_pair(maj, x)[1] == pytest.approx(y, rel=1e-10)


def test_pde_min_inverse_brute_force():
    maj = Majorant(coefficients=(1.0, 1.0), exponents=(0.5, 3.0), a=lambda r: r)
    xs = np.geomspace(1e-4, 1e6, 400001)
    mins = np.minimum(xs ** (1 / 0.5), xs ** (1 / 3.0))
    for y in (0.01, 0.5, 1.0, 2.0, 50.0):
        brute = xs[np.searchsorted(mins, y)]
        assert pde_min_inverse(maj, y) == pytest.approx(brute, rel=1e-3)


def test_bisect_r1(r1, grid2048):
    est = bisect_pullin(r1, width=1e-3, grid=grid2048)
    assert est.bracket_hi - est.bracket_lo <= 1e-3
    assert est.lower < est.bracket_lo < est.bracket_hi < est.upper
    statuses = dict(est.trace)
    assert statuses[est.bracket_lo] != Status.TOUCHDOWN.value
    assert statuses[est.bracket_hi] == Status.TOUCHDOWN.value


def test_bisect_wide_width_bounds_only(r1):
    est = bisect_pullin(r1, width=100.0)
    assert est.evaluations == 0
    assert (est.bracket_lo, est.bracket_hi) == (est.lower, est.upper)


def test_bisect_bad_width(r1):
    with pytest.raises(ValueError):
        bisect_pullin(r1, width=0.0)


def test_bisect_sphere_cap():
    op = SphereCap(3, 1.0)
    prob = Problem(op, MemsPower(2.0), DirectSource(lambda r: np.sin(np.asarray(r)) ** 2))
    est = bisect_pullin(prob, width=1e-2, grid=graded_grid(256, 2.0))
    assert est.lower < est.bracket_lo < est.bracket_hi < est.upper


def test_branch_sweep_monotone_and_ordered(r1, grid256):
    lams = np.linspace(0, 1.4, 12)
    pts = branch_sweep(r1, lams, grid256)
    par = branch_sweep(r1, lams, grid256, jobs=4)
    assert [p.lam for p in pts] == list(lams)
    assert [(p.u0, p.status) for p in pts] == [(p.u0, p.status) for p in par]
    conv = [p.u0 for p in pts if p.status is Status.CONVERGED]
    assert np.all(np.diff(conv) >= 0)
    assert pts[-1].status is Status.TOUCHDOWN


def test_branch_sweep_unsorted_rejected(r1):
    with pytest.raises(ValueError):
        branch_sweep(r1, [1.0, 0.5])


def _emden_fowler_fold():
    # R1 is Delta y = lam / y^2 in 3D with y = 1 - u.  Writing y = c Y(k r) with
    # Y'' + 2Y'/s = 1/Y^2, Y(0) = 1, the boundary condition gives lam(k) = k^2 / Y(k)^3;
    # its maximum over k is the fold of the minimal branch.
    from scipy.integrate import solve_ivp
    from scipy.optimize import minimize_scalar
    s0 = 1e-4
    sol = solve_ivp(lambda s, y: [y[1], 1 / y[0] ** 2 - 2 * y[1] / s], (s0, 10.0),
                    [1 + s0**2 / 6, s0 / 3], method="DOP853", rtol=1e-13, atol=1e-15, dense_output=True)
    res = minimize_scalar(lambda k: -k**2 / sol.sol(k)[0] ** 3, bounds=(2.0, 5.0), method="bounded",
                          options={"xatol": 1e-10})
    return -res.fun


def test_r1_bracket_contains_independent_fold(r1, grid2048):
    fold = _emden_fowler_fold()
    assert fold == pytest.approx(1.29879, abs=1e-5)
    est = bisect_pullin(r1, width=1e-4, grid=grid2048)
    assert est.bracket_lo <= fold <= est.bracket_hi + 1e-6


def test_pde_pair_examples():
    maj = Majorant(coefficients=(1.0, 1.0), exponents=(2.0, 1.0), a=lambda r: r)
    assert pde_pair(maj, 4.0) == (4.0, 2.0)
    assert pde_pair(maj, 1.0) == (1.0, 1.0)
    assert pde_min_inverse(maj, 2.0) == pytest.approx(4.0)
    assert pde_min_inverse(maj, 1.0) == 1.0
    ident = Majorant(coefficients=(1.0,), exponents=(1.0,), a=lambda r: r)
    assert pde_pair(ident, 0.37) == (0.37, 0.37)
    assert pde_min_inverse(ident, 0.37) == pytest.approx(0.37)


def test_lower_bound_scales_with_source():
    # phi^{-1} is linear in w here, so doubling f halves Phi^{-1} and the bound
    base = Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 10.0))
    twice = Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 20.0))
    assert lower_bound(twice) == pytest.approx(lower_bound(base) / 2, rel=1e-7)


def test_lower_bound_matches_delta_grid():
    prob = Problem(PowerMonomial(2.0, 0.0), MemsPower(2.0), WeightedPower(2.0, 10.0))
    d = np.linspace(1e-6, 1 - 1e-6, 200001)
    brute = np.max(d * 0.6 * (1 - d) ** 2)     # Phi^{-1}(delta) = 0.6 delta
    assert lower_bound(prob) == pytest.approx(brute, abs=1e-6)


def test_sweep_examples(r1, grid256):
    (p0,) = branch_sweep(r1, [0.0], grid256)
    assert p0.u0 == 0.0 and p0.status is Status.CONVERGED
    u0 = [p.u0 for p in branch_sweep(r1, [0.0, 0.1, 0.2], grid256)]
    assert 0 == u0[0] < u0[1] < u0[2]


def test_refinement_trend_settles(r1):
    from touchdown.pullin import refinement_trend
    trend = refinement_trend(r1, (256, 1024), width=1e-3)
    assert [m for m, _, _ in trend] == [256, 1024]
    (_, lo1, hi1), (_, lo2, hi2) = trend
    assert max(lo1, lo2) <= min(hi1, hi2)   # brackets overlap
