"""Exact near-origin law of the touchdown solution for the power-monomial operator.

For phi(r, v) = r**alpha |v|**beta v, f = r**gamma h, and g' ~ -A g**q near
u = 1, the touchdown solution behaves as

    u*(r) = 1 - coef(lam*) r**(theta sigma (1-q)) + o(...)

with theta = gamma + 2 + beta - alpha and sigma = 1/((1-q)(beta+1) + 1).
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .models import GapFunction, PowerMonomial
from .solver import SolutionGrid


class AsymptoticsError(ValueError):
    pass


@dataclass(frozen=True)
class AsymptoticConstants:
    alpha: float
    beta: float
    gamma: float
    A: float
    q: float
    C: float
    theta: float
    sigma: float
    kappa: float

    @property
    def exponent(self) -> float:
        return self.theta * self.sigma * (1.0 - self.q)

    def coef(self, lam_star: float) -> float:
        """Leading coefficient of 1 - u*(r) given the pull-in voltage."""
        q = self.q
        return self.kappa ** (1 - q) * lam_star ** (self.sigma * (1 - q)) / (self.A * (1 - q))

    def singular_lambda(self, g0: float = 1.0) -> float:
        """Closed-form zero crossing of g^{-1}(kappa e^{-theta sigma t}).

        Exact only when that profile solves the equation outright, i.e. for
        g = (1-u)**p with constant h.
        """
        return (self.kappa / g0) ** (-1.0 / self.sigma)

    def as_dict(self):
        return {"theta": self.theta, "sigma": self.sigma, "kappa": self.kappa,
                "exponent": self.exponent, "A": self.A, "q": self.q, "C": self.C}


def compute_constants(op: PowerMonomial, gap: GapFunction, C: float, gamma: float) -> AsymptoticConstants:
    alpha, beta = op.alpha, op.beta
    A, q = float(gap.A), float(gap.q)
    if not (beta > -1 and alpha > beta + 1 and gamma >= alpha):
        raise AsymptoticsError(f"need beta > -1, alpha > beta+1, gamma >= alpha; "
                               f"got alpha={alpha}, beta={beta}, gamma={gamma}")
    if not (0 < q < 1 and A > 0 and C > 0):
        raise AsymptoticsError(f"need q in (0,1), A > 0, C > 0; got q={q}, A={A}, C={C}")
    theta = gamma + 2.0 + beta - alpha
    sigma = 1.0 / ((1.0 - q) * (beta + 1.0) + 1.0)
    room = gamma + 1.0 - theta * sigma
    if room <= 0:
        raise AsymptoticsError(f"gamma + 1 - theta*sigma = {room} must be positive")
    kappa = (A / (theta * sigma)) ** ((beta + 1.0) * sigma) * (C / room) ** sigma
    return AsymptoticConstants(alpha, beta, gamma, A, q, C, theta, sigma, kappa)


def expansion_eval(const: AsymptoticConstants, lam_star: float, r):
    r = np.asarray(r, float)
    return 1.0 - const.coef(lam_star) * r**const.exponent


def identity_residuals(const: AsymptoticConstants) -> tuple[float, float]:
    """Relative defects of the two balance relations fixing sigma and kappa.

    The first balances exponents, theta sigma q + theta (1-sigma)/(beta+1)
    = theta sigma; the second balances coefficients,
    A kappa**q (C / (kappa (gamma+1-theta sigma)))**(1/(1+beta)) = theta sigma kappa.
    """
    th, s, q, b = const.theta, const.sigma, const.q, const.beta
    lhs1 = th * s * q + th * (1 - s) / (b + 1)
    rhs1 = th * s
    k = const.kappa
    lhs2 = const.A * k**q * (const.C / (k * (const.gamma + 1 - th * s))) ** (1 / (1 + b))
    rhs2 = th * s * k
    return abs(lhs1 - rhs1) / abs(rhs1), abs(lhs2 - rhs2) / abs(rhs2)


@dataclass
class PowerLawFit:
    exponent: float
    coef: float
    r2: float
    n: int


def fit_asymptotics(u: SolutionGrid, r_window=(1e-4, 1e-2)) -> PowerLawFit:
    """Least-squares line through log(1 - u) against log r on the window."""
    r = u.grid.nodes
    sel = (r >= r_window[0]) & (r <= r_window[1]) & (u.u < 1.0)
    if np.count_nonzero(sel) < 8:
        raise AsymptoticsError(f"only {np.count_nonzero(sel)} usable nodes in window {r_window}")
    x = np.log(r[sel])
    y = np.log1p(-u.u[sel])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    ss_res = float(np.sum((y - fitted) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    return PowerLawFit(float(slope), float(np.exp(intercept)), r2, int(np.count_nonzero(sel)))
