"""Backward shooting for the touchdown solution of the power-monomial model.

With r = c e^{-t} the problem moves to a neighbourhood of t = +inf, where the
singular solution is seeded from v(t) = g^{-1}(kappa e^{-theta sigma t}).
The first-order system

    w' = -e^{-(gamma+1) t} h / g(v),      v' = e^{(alpha/(beta+1) - 1) t} w^{1/(beta+1)}

is then integrated toward decreasing t until v hits zero at T*, which gives
lam* = e^{-theta T*} and u*(r) = v(T* - ln r).

The state is carried as the gap s = 1 - v: near the seed v is within
rounding of 1 and g(v) would lose all its digits.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate, optimize
from scipy.interpolate import PchipInterpolator

from .asymptotics import AsymptoticConstants, compute_constants
from .models import GapFunction, PowerMonomial, Problem, WeightedPower
from .quadrature import RadialGrid, graded_grid
from .solver import SolutionGrid

log = logging.getLogger(__name__)


class ShooterError(RuntimeError):
    pass


class SeedError(ShooterError):
    pass


class NoZeroCrossing(ShooterError):
    pass


class IntegrityError(ShooterError):
    pass


@dataclass(frozen=True)
class ShooterConfig:
    T: float | None = None          # None: smallest T with kappa e^{-theta sigma T} <= seed_tail_tol
    dt: float = 1e-3
    t_floor: float | None = None    # None: T - 200
    seed_tail_tol: float = 1e-10
    root_tol: float = 1e-10
    refine: bool = False            # apply the Gamma map to the seed
    refine_span: float = 20.0
    refine_points: int = 4001
    refine_sweeps: int = 8
    max_outer: int = 3


@dataclass
class ShooterState:
    t: float
    v: float
    w: float


@dataclass
class ShooterResult:
    t_star: float
    lambda_star: float
    t: np.ndarray
    gap: np.ndarray     # s = 1 - v, accurate near v = 1
    w: np.ndarray
    constants: AsymptoticConstants
    config: ShooterConfig
    seed: dict = field(default_factory=dict)
    touchdown_profile: SolutionGrid | None = None

    @property
    def v(self) -> np.ndarray:
        return 1.0 - self.gap

    @property
    def trajectory(self) -> list[ShooterState]:
        return [ShooterState(float(a), float(1.0 - b), float(c)) for a, b, c in zip(self.t, self.gap, self.w)]

    @property
    def r_min(self) -> float:
        return math.exp(self.t_star - self.t.max())


# ----------------------------------------------------------------------------
# seed machinery
# ----------------------------------------------------------------------------

def _h_of_t(src: WeightedPower, t_ref: float):
    """h re-expressed in the shooting time, h(e^{t_ref - t}); constant h stays a float."""
    if src.constant_h:
        return float(src.h)

    def h(t):
        r = np.minimum(np.exp(t_ref - np.asarray(t, float)), 1.0)
        return src.h_eval(r)
    return h


def psi_eval(const: AsymptoticConstants, h, t, quadrature: bool = False):
    """kappa^{-1} int_t^inf e^{(alpha-beta-1)(t-s)} e^{-theta(1-sigma)s} h(s) ds.

    ``h`` is a constant or a callable of the shooting time.  A constant uses
    the closed form unless ``quadrature`` is set.
    """
    th, sg, k = const.theta, const.sigma, const.kappa
    decay = const.gamma + 1.0 - th * sg
    if decay <= 0:
        raise ShooterError("psi diverges: gamma + 1 - theta*sigma <= 0")
    t = np.asarray(t, float)
    if not callable(h) and not quadrature:
        return float(h) * np.exp(-th * (1.0 - sg) * t) / (k * decay)
    hf = h if callable(h) else (lambda s: float(h))
    span = 16.0 * math.log(10.0) / decay

    def one(t0):
        val, err = integrate.quad(lambda tau: math.exp(-decay * tau) * float(hf(t0 + tau)),
                                  0.0, span, limit=200, epsabs=0.0, epsrel=1e-13)
        return math.exp(-th * (1.0 - sg) * t0) * val / k

    out = np.array([one(x) for x in np.ravel(t)])
    return out.reshape(t.shape) if t.ndim else float(out[0])


def auto_seed_time(const: AsymptoticConstants, tail_tol: float = 1e-10) -> float:
    # tiny pad so rounding cannot push the seed level back over tail_tol
    return math.log(const.kappa / tail_tol) / (const.theta * const.sigma) + 1e-9


def seed_state(const: AsymptoticConstants, gap: GapFunction, h, T: float,
               tail_tol: float = 1e-10, x: float = 0.0, y: float = 0.0):
    """Seed (gap, w) at T from the singular ansatz with correction x and psi-defect y.

    Returns ``(s, w)`` where s = 1 - v(T).
    """
    level = const.kappa * math.exp(-const.theta * const.sigma * T)
    if level > tail_tol:
        raise SeedError(f"kappa e^(-theta sigma T) = {level:.3e} exceeds {tail_tol:.1e}; increase T")
    s = float(gap.gap_of_level(level + x))
    psi = psi_eval(const, h, T)
    w = math.exp((const.beta + 1.0 - const.alpha) * T) * (psi + y)
    return s, w


def gamma_refine(const: AsymptoticConstants, gap: GapFunction, h, t: np.ndarray, x: np.ndarray):
    """One discrete application of the fixed-point map for the seed correction x.

    ``t`` is an increasing grid on [T, T_max]; integrals beyond T_max are
    dropped.  Returns ``(Gamma(x), y)`` on the same grid.
    """
    t = np.asarray(t, float)
    x = np.asarray(x, float)
    if t.size < 3:
        raise ShooterError("gamma_refine needs at least 3 grid points")
    th, sg, k, b = const.theta, const.sigma, const.kappa, const.beta
    lead = k * np.exp(-th * sg * t)
    chi = x / lead
    if np.max(np.abs(chi)) > 0.25:
        raise ShooterError(f"seed correction leaves the admissible ball: max |chi| = {np.max(np.abs(chi)):.3g}")
    hv = np.full(t.shape, float(h)) if not callable(h) else np.asarray(h(t), float)
    decay = const.gamma + 1.0 - th * sg
    # y(t) = -kappa^{-1} e^{(alpha-beta-1)t} int_t^Tmax e^{-decay s} h chi/(1+chi) ds
    integrand = np.exp(-decay * (t - t[0])) * hv * chi / (1.0 + chi)
    tail = _reverse_cumtrapz(integrand, t)
    y = -(1.0 / k) * np.exp((const.alpha - b - 1.0) * t - decay * t[0]) * tail
    psi = psi_eval(const, h, t)
    slope = (psi + y) ** (1.0 / (b + 1.0)) * gap.dg_at_level(lead + x) + th * sg * lead
    return -_reverse_cumtrapz(slope, t), y


def _reverse_cumtrapz(f, t):
    out = np.zeros_like(f)
    out[:-1] = np.cumsum((0.5 * np.diff(t) * (f[1:] + f[:-1]))[::-1])[::-1]
    return out


def _refined_seed(const, gap, h, cfg, T):
    t = np.linspace(T, T + cfg.refine_span, cfg.refine_points)
    x = np.zeros_like(t)
    y = np.zeros_like(t)
    for _ in range(cfg.refine_sweeps):
        x, y = gamma_refine(const, gap, h, t, x)
    return float(x[0]), float(y[0])


# ----------------------------------------------------------------------------
# integration
# ----------------------------------------------------------------------------

def _rhs_factory(const, gap, h):
    a, b, g1 = const.alpha, const.beta, const.gamma + 1.0
    ev = a / (b + 1.0) - 1.0
    pw = 1.0 / (b + 1.0)
    hf = h if callable(h) else None
    hc = None if callable(h) else float(h)

    def rhs(t, s, w):
        hv = hc if hf is None else float(hf(t))
        ds = -math.exp(ev * t) * w**pw
        dw = -math.exp(-g1 * t) * hv / float(gap.g_of_gap(s))
        return ds, dw
    return rhs


def _rk4(rhs, t, s, w, h):
    k1 = rhs(t, s, w)
    k2 = rhs(t + h / 2, s + h / 2 * k1[0], w + h / 2 * k1[1])
    k3 = rhs(t + h / 2, s + h / 2 * k2[0], w + h / 2 * k2[1])
    k4 = rhs(t + h, s + h * k3[0], w + h * k3[1])
    return (s + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]),
            w + h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]))


def _integrate(const, gap, h, cfg, T, s0, w0):
    rhs = _rhs_factory(const, gap, h)
    t_floor = T - 200.0 if cfg.t_floor is None else cfg.t_floor
    n_max = int(math.ceil((T - t_floor) / cfg.dt)) + 1
    ts, ss, ws = [T], [s0], [w0]
    t, s, w = T, s0, w0
    for _ in range(n_max):
        if t <= t_floor:
            break
        # stiffness guard: relative change of w per substep at most 10%
        dw = rhs(t, s, w)[1]
        n_sub = max(1, int(math.ceil(abs(dw) * cfg.dt / (0.1 * w)))) if w > 0 else 1
        hstep = -cfg.dt / n_sub
        for _ in range(n_sub):
            s, w = _rk4(rhs, t, s, w, hstep)
            t += hstep
        if not (w > 0 and math.isfinite(w)):
            raise IntegrityError(f"w = {w} at t = {t:.6g}")
        ts.append(t)
        ss.append(s)
        ws.append(w)
        if s >= 1.0:
            return np.array(ts), np.array(ss), np.array(ws), rhs
    raise NoZeroCrossing(f"v stayed positive down to t = {t:.6g}")


def _locate_crossing(rhs, ts, ss, ws, tol):
    """T* inside the last step from the cubic Hermite interpolant of s."""
    t1, t0 = ts[-2], ts[-1]     # t1 > t0; s(t1) < 1 <= s(t0)
    s1, s0 = ss[-2], ss[-1]
    d1 = rhs(t1, s1, ws[-2])[0]
    d0 = rhs(t0, s0, ws[-1])[0]
    hlen = t1 - t0

    def cubic(tt):
        x = (tt - t0) / hlen
        h00 = 2 * x**3 - 3 * x**2 + 1
        h10 = x**3 - 2 * x**2 + x
        h01 = -2 * x**3 + 3 * x**2
        h11 = x**3 - x**2
        return h00 * s0 + h10 * hlen * d0 + h01 * s1 + h11 * hlen * d1 - 1.0

    if s0 == 1.0:
        return t0
    return optimize.brentq(cubic, t0, t1, xtol=min(tol, 1e-14), rtol=1e-15)


def shoot_backward(problem: Problem, cfg: ShooterConfig | None = None,
                   grid: RadialGrid | None = None) -> ShooterResult:
    """Shoot the singular solution down to its zero crossing.

    For non-constant h the profile is re-expressed in shooting time through
    the previous pass's T*, repeated up to ``cfg.max_outer`` times.
    """
    cfg = cfg or ShooterConfig()
    op, gap, src = problem.operator, problem.gap, problem.source
    if not isinstance(op, PowerMonomial) or not isinstance(src, WeightedPower):
        raise ShooterError("shooting needs a power-monomial operator and a weighted power source")
    const = compute_constants(op, gap, src.C, src.gamma)
    T = auto_seed_time(const, cfg.seed_tail_tol) if cfg.T is None else float(cfg.T)
    if cfg.t_floor is not None and not T > cfg.t_floor:
        raise ShooterError("seed time must exceed t_floor")

    t_ref = 0.0
    passes = 1 if src.constant_h else cfg.max_outer
    for k in range(passes):
        h = _h_of_t(src, t_ref)
        x0 = y0 = 0.0
        if cfg.refine:
            x0, y0 = _refined_seed(const, gap, h, cfg, T)
        s0, w0 = seed_state(const, gap, h, T, cfg.seed_tail_tol, x0, y0)
        ts, ss, ws, rhs = _integrate(const, gap, h, cfg, T, s0, w0)
        t_star = _locate_crossing(rhs, ts, ss, ws, cfg.root_tol)
        done = abs(t_star - t_ref) < 1e-10
        t_ref = t_star
        if done:
            break

    monotone = bool(np.all(np.diff(ss) > 0))
    if not monotone:
        log.warning("v is not strictly monotone along the trajectory")
    # keep the trajectory on [T*, T] and close it with the crossing itself
    keep = ss < 1.0
    ts, ss, ws = ts[keep], ss[keep], ws[keep]
    w_star = float(np.interp(t_star, ts[::-1], ws[::-1])) if ts[-1] > t_star else float(ws[-1])
    ts = np.append(ts, t_star)
    ss = np.append(ss, 1.0)
    ws = np.append(ws, w_star)
    res = ShooterResult(
        t_star=float(t_star), lambda_star=math.exp(-const.theta * t_star),
        t=ts[::-1].copy(), gap=ss[::-1].copy(), w=ws[::-1].copy(), constants=const,
        config=replace(cfg, T=T),
        seed={"T": T, "level": const.kappa * math.exp(-const.theta * const.sigma * T),
              "gap": s0, "w": w0, "x": x0, "y": y0, "monotone": monotone, "outer_passes": k + 1},
    )
    if grid is not None:
        res.touchdown_profile = reconstruct_touchdown(res, grid)
    return res


def reconstruct_touchdown(result: ShooterResult, grid: RadialGrid) -> SolutionGrid:
    """u*(r) = v(T* - ln r) on the grid nodes by monotone cubic interpolation."""
    r = grid.nodes
    if r.min() < result.r_min * (1 - 1e-12):
        raise ShooterError(f"grid node {r.min():.3g} lies below trajectory coverage {result.r_min:.3g}; "
                           f"shoot from a larger T")
    interp = PchipInterpolator(result.t, np.log(result.gap))
    tt = np.clip(result.t_star - np.log(r), result.t[0], result.t[-1])
    u = 1.0 - np.exp(interp(tt))
    u[-1] = 0.0 if r[-1] == 1.0 else u[-1]
    return SolutionGrid(grid, u, result.lambda_star)


def seed_time_for_grid(problem: Problem, grid: RadialGrid, cfg: ShooterConfig | None = None) -> float:
    """A seed time whose trajectory covers every node of ``grid``.

    Uses the closed-form crossing as an estimate of T* and pads by 2.
    """
    cfg = cfg or ShooterConfig()
    src = problem.source
    const = compute_constants(problem.operator, problem.gap, src.C, src.gamma)
    t_est = math.log(const.kappa / float(problem.gap.g(0.0))) / (const.theta * const.sigma)
    T_auto = auto_seed_time(const, cfg.seed_tail_tol)
    return max(T_auto, t_est - math.log(grid.nodes[0]) + 2.0)
