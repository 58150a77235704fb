"""Sectioned key=value run configuration.

    [model]
    operator = power        ; power | sum | variable | sphere
    alpha = 2
    beta = 0
    gamma = 2
    gap = mems
    p = 2
    source = weighted       ; weighted | direct | sphere
    C = 1

    [numerics]
    M = 2048
    grading = 2

    [output]
    dir = out
    svg = false

Extra model keys: ``terms = 2:0, 3:1`` (sum), ``N``, ``p_coeffs``, ``eps``
(variable; p(r) is the polynomial with those coefficients, lowest first),
``N``, ``rho`` (sphere), ``h_coeffs`` (polynomial permittivity for the
weighted source), ``f_coeffs`` (direct source).
"""
from __future__ import annotations

import configparser
from dataclasses import dataclass, field

import numpy as np

from .models import (DirectSource, MemsPower, MonomialSum, PowerMonomial, Problem, SphereCap,
                     VariableExponent, WeightedPower)
from .quadrature import graded_grid
from .shooter import ShooterConfig
from .solver import EPS_TD, G_FLOOR, MAX_ITER, TOL_FIX, TOL_RES


class ConfigError(ValueError):
    """Malformed or incomplete configuration; ``where`` names the offending key."""

    def __init__(self, msg, where=""):
        super().__init__(f"{where}: {msg}" if where else msg)
        self.where = where


NUMERIC_DEFAULTS = {
    "M": "2048", "grading": "2", "tol_fix": repr(TOL_FIX), "tol_res": repr(TOL_RES),
    "eps_td": repr(EPS_TD), "g_floor": repr(G_FLOOR), "max_iter": str(MAX_ITER),
    "dt": "1e-3", "T_auto": "true", "T": "", "seed_tail_tol": "1e-10", "width": "1e-3",
}
OUTPUT_DEFAULTS = {"dir": "out", "svg": "false"}


@dataclass
class Polynomial:
    """Callable polynomial with coefficients listed lowest degree first."""

    coeffs: tuple

    def __call__(self, r):
        return np.polynomial.polynomial.polyval(np.asarray(r, float), self.coeffs)


@dataclass
class RunConfig:
    problem: Problem
    numerics: dict
    output: dict
    resolved: dict = field(default_factory=dict)

    @property
    def grid(self):
        return graded_grid(int(self.numerics["M"]), float(self.numerics["grading"]))

    def solver_kw(self):
        n = self.numerics
        return {"tol_fix": float(n["tol_fix"]), "eps_td": float(n["eps_td"]),
                "g_floor": float(n["g_floor"]), "max_iter": int(n["max_iter"])}

    def shooter_config(self) -> ShooterConfig:
        n = self.numerics
        auto = _as_bool(n["T_auto"], "numerics.T_auto")
        T = None if auto or not n["T"] else float(n["T"])
        return ShooterConfig(T=T, dt=float(n["dt"]), seed_tail_tol=float(n["seed_tail_tol"]))


def _as_bool(text, where):
    low = str(text).strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off", ""):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}", where)


def _num(sec, key, where, default=None):
    if key not in sec:
        if default is None:
            raise ConfigError("missing key", f"{where}.{key}")
        return default
    try:
        return float(sec[key])
    except ValueError:
        raise ConfigError(f"expected a number, got {sec[key]!r}", f"{where}.{key}") from None


def _numlist(text, where):
    try:
        return tuple(float(x) for x in text.replace(",", " ").split())
    except ValueError:
        raise ConfigError(f"expected numbers, got {text!r}", where) from None


def build_problem(m) -> Problem:
    kind = m.get("operator", "power").strip().lower()
    if kind == "power":
        op = PowerMonomial(_num(m, "alpha", "model"), _num(m, "beta", "model"))
    elif kind == "sum":
        if "terms" not in m:
            raise ConfigError("missing key", "model.terms")
        try:
            terms = [tuple(float(y) for y in x.split(":")) for x in m["terms"].split(",") if x.strip()]
            if any(len(t) != 2 for t in terms):
                raise ValueError
        except ValueError:
            raise ConfigError(f"terms must look like 'a1:b1, a2:b2', got {m['terms']!r}", "model.terms") from None
        op = MonomialSum(tuple(terms))
    elif kind == "variable":
        coeffs = _numlist(m.get("p_coeffs", ""), "model.p_coeffs")
        if not coeffs:
            raise ConfigError("missing key", "model.p_coeffs")
        op = VariableExponent(_num(m, "N", "model"), Polynomial(coeffs), _num(m, "eps", "model", 0.5))
    elif kind == "sphere":
        op = SphereCap(int(_num(m, "N", "model")), _num(m, "rho", "model", 1.0))
    else:
        raise ConfigError(f"unknown operator {kind!r}", "model.operator")

    gkind = m.get("gap", "mems").strip().lower()
    if gkind != "mems":
        raise ConfigError(f"unknown gap {gkind!r} (only 'mems' is configurable)", "model.gap")
    gap = MemsPower(_num(m, "p", "model"))

    skind = m.get("source", "weighted").strip().lower()
    C = _num(m, "C", "model", 1.0)
    if skind == "weighted":
        if "h_coeffs" in m:
            poly = Polynomial(_numlist(m["h_coeffs"], "model.h_coeffs"))
            src = WeightedPower(_num(m, "gamma", "model"), poly, C=float(poly(0.0)))
        else:
            src = WeightedPower(_num(m, "gamma", "model"), C)
    elif skind == "direct":
        src = DirectSource(Polynomial(_numlist(m.get("f_coeffs", ""), "model.f_coeffs") or (C,)))
    elif skind == "sphere":
        if not isinstance(op, SphereCap):
            raise ConfigError("source 'sphere' needs operator 'sphere'", "model.source")
        src = DirectSource(_SphereWeight(op.N, op.rho, C))
    else:
        raise ConfigError(f"unknown source {skind!r}", "model.source")
    return Problem(op, gap, src)


@dataclass
class _SphereWeight:
    N: int
    rho: float
    C: float

    def __call__(self, r):
        return self.C * np.sin(np.asarray(r, float) / self.rho) ** (self.N - 1)


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(inline_comment_prefixes=(";", "#"))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc).splitlines()[0], "config") from None
    if "model" not in cp:
        raise ConfigError("missing section", "[model]")
    model = dict(cp["model"])
    problem = build_problem(model)
    numerics = dict(NUMERIC_DEFAULTS)
    if "numerics" in cp:
        unknown = set(cp["numerics"]) - set(NUMERIC_DEFAULTS)
        if unknown:
            raise ConfigError(f"unknown keys {sorted(unknown)}", "[numerics]")
        numerics.update(cp["numerics"])
    for key in ("M", "grading", "tol_fix", "tol_res", "dt", "width", "max_iter"):
        _num(numerics, key, "numerics")
    output = dict(OUTPUT_DEFAULTS)
    if "output" in cp:
        output.update(cp["output"])
    resolved = {"model": model, "numerics": numerics, "output": output}
    return RunConfig(problem, numerics, output, resolved)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(str(exc), str(path)) from None
    return parse_config(text)
