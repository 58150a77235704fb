"""Command-line front end.

    touchdown {validate,solve,pullin,branch,asymptotics,shoot,crosscheck} --config FILE [options]

Exit codes: 0 ok, 1 computational failure, 2 usage or configuration error.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import asymptotics as asy
from .config import ConfigError, load_config
from .models import PowerMonomial, WeightedPower, validate_hypotheses
from .pullin import InconsistentBracket, bisect_pullin, branch_sweep, refinement_trend
from .shooter import ShooterError, seed_time_for_grid, shoot_backward
from .solver import Status, solve_from_subsolution

log = logging.getLogger("touchdown")

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class CommandFailed(Exception):
    pass


def _fmt(x):
    return format(float(x), ".17g")


def write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(x) if isinstance(x, (float, np.floating)) else x for x in row])


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def write_json(path, payload, cfg):
    payload = dict(payload)
    payload["config"] = cfg.resolved
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(_clean(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _outdir(cfg, args):
    out = Path(args.out or cfg.output.get("dir", "out"))
    out.mkdir(parents=True, exist_ok=True)
    return out


def _want_svg(cfg, args):
    return args.svg or cfg.output.get("svg", "false").strip().lower() in ("1", "true", "yes", "on")


def _gate(cfg, args, shooter=False):
    rep = validate_hypotheses(cfg.problem.operator, cfg.problem.gap, cfg.problem.source, shooter=shooter)
    if not rep.ok and not args.force:
        for line in rep.lines():
            print(line, file=sys.stderr)
        raise CommandFailed("hypotheses not satisfied (use --force to override)")
    return rep


# ----------------------------------------------------------------------------
# commands
# ----------------------------------------------------------------------------

def cmd_validate(cfg, args):
    rep = validate_hypotheses(cfg.problem.operator, cfg.problem.gap, cfg.problem.source,
                              shooter=args.shooter)
    for line in rep.lines():
        print(line)
    return EXIT_OK if rep.ok else EXIT_FAIL


def cmd_solve(cfg, args):
    if args.lam is None:
        raise ConfigError("solve needs --lambda", "--lambda")
    if args.lam < 0:
        raise ConfigError("lambda must be nonnegative", "--lambda")
    _gate(cfg, args)
    out = _outdir(cfg, args)
    grid = cfg.grid
    sol, rep = solve_from_subsolution(cfg.problem, args.lam, grid, **cfg.solver_kw())
    write_csv(out / "solution.csv", ["r", "u"], zip(grid.nodes, sol.u))
    tol_res = float(cfg.numerics["tol_res"])
    ok = rep.status is Status.CONVERGED and rep.residual <= tol_res
    write_json(out / "solve.json", {"lambda": args.lam, "report": rep.as_dict(), "u0": sol.u0,
                                   "tol_res": tol_res, "ok": ok}, cfg)
    if _want_svg(cfg, args):
        from .plotting import profile_svg
        profile_svg(out / "solution.svg", grid.nodes, sol.u, f"lambda = {args.lam:g} ({rep.status.value})")
    print(f"{rep.status.value}: iterations={rep.iterations} residual={rep.residual:.3e} u0={sol.u0:.12g}")
    return EXIT_OK if ok else EXIT_FAIL


def _pullin(cfg, args):
    width = args.width if args.width is not None else float(cfg.numerics["width"])
    return bisect_pullin(cfg.problem, width=width, grid=cfg.grid, **cfg.solver_kw())


def cmd_pullin(cfg, args):
    _gate(cfg, args)
    out = _outdir(cfg, args)
    est = _pullin(cfg, args)
    payload = est.as_dict()
    if est.evaluations:
        # same bisection on coarser grids: shows whether the discrete threshold has settled
        M = int(cfg.numerics["M"])
        Ms = [m for m in (M // 4, M // 2) if m >= 16]
        width = args.width if args.width is not None else float(cfg.numerics["width"])
        trend = refinement_trend(cfg.problem, Ms, width, float(cfg.numerics["grading"]), **cfg.solver_kw())
        payload["refinement"] = [{"M": m, "bracket_lo": lo, "bracket_hi": hi}
                                 for m, lo, hi in trend + [(M, est.bracket_lo, est.bracket_hi)]]
    write_json(out / "pullin.json", payload, cfg)
    write_csv(out / "pullin_trace.csv", ["lambda", "classification"], est.trace)
    print(f"lower={est.lower:.12g} upper={est.upper:.12g} bracket=[{est.bracket_lo:.12g}, {est.bracket_hi:.12g}]")
    return EXIT_OK


def _parse_lambdas(text):
    text = text.strip()
    if not text:
        return []
    if ":" in text:
        try:
            a, b, n = text.split(":")
            return list(np.linspace(float(a), float(b), int(n)))
        except ValueError:
            raise ConfigError(f"expected start:stop:count, got {text!r}", "--lambdas") from None
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise ConfigError(f"expected a comma list, got {text!r}", "--lambdas") from None


def cmd_branch(cfg, args):
    _gate(cfg, args)
    out = _outdir(cfg, args)
    if args.lambdas is None:
        est = _pullin(cfg, args)
        lambdas = list(np.linspace(0.0, est.bracket_hi, 32))
    else:
        lambdas = _parse_lambdas(args.lambdas)
    pts = branch_sweep(cfg.problem, lambdas, cfg.grid, jobs=args.jobs, **cfg.solver_kw())
    write_csv(out / "branch.csv", ["lambda", "u0", "norm_sup", "status"],
              [(p.lam, p.u0, p.norm_sup, p.status.value) for p in pts])
    if _want_svg(cfg, args) and pts:
        from .plotting import branch_svg
        branch_svg(out / "branch.svg", [p.lam for p in pts], [p.u0 for p in pts],
                   [p.status is Status.CONVERGED for p in pts])
    print(f"{len(pts)} branch points written")
    return EXIT_OK


def _constants(cfg):
    op, src = cfg.problem.operator, cfg.problem.source
    if not isinstance(op, PowerMonomial) or not isinstance(src, WeightedPower):
        raise CommandFailed("asymptotics are available for the power-monomial operator with a weighted source only")
    try:
        return asy.compute_constants(op, cfg.problem.gap, src.C, src.gamma)
    except asy.AsymptoticsError as exc:
        raise CommandFailed(str(exc)) from None


def cmd_asymptotics(cfg, args):
    out = _outdir(cfg, args)
    const = _constants(cfg)
    payload = {"constants": const.as_dict()}
    if args.lam is not None:
        payload["lambda_star"] = args.lam
        payload["coef"] = const.coef(args.lam)
    write_json(out / "asymptotics.json", payload, cfg)
    print(json.dumps(_clean(payload["constants"]), sort_keys=True))
    return EXIT_OK


def _shoot(cfg):
    const = _constants(cfg)
    grid = cfg.grid
    scfg = cfg.shooter_config()
    T = seed_time_for_grid(cfg.problem, grid, scfg)
    if scfg.T is not None:
        T = max(T, scfg.T)
    try:
        res = shoot_backward(cfg.problem, replace(scfg, T=T), grid=grid)
    except ShooterError as exc:
        raise CommandFailed(str(exc)) from None
    return const, res


def cmd_shoot(cfg, args):
    _gate(cfg, args, shooter=True)
    out = _outdir(cfg, args)
    const, res = _shoot(cfg)
    prof = res.touchdown_profile
    payload = {"constants": const.as_dict(), "T_star": res.t_star, "lambda_star": res.lambda_star,
               "coef": const.coef(res.lambda_star), "seed": res.seed}
    try:
        fit = asy.fit_asymptotics(prof)
        payload["fit"] = {"exponent_hat": fit.exponent, "coef_hat": fit.coef, "r2": fit.r2, "nodes": fit.n,
                          "exponent_rel_err": abs(fit.exponent / const.exponent - 1),
                          "coef_rel_err": abs(fit.coef / const.coef(res.lambda_star) - 1)}
    except asy.AsymptoticsError as exc:
        payload["fit"] = {"error": str(exc)}
    write_json(out / "shoot.json", payload, cfg)
    write_csv(out / "trajectory.csv", ["t", "v", "w"], zip(res.t, res.v, res.w))
    write_csv(out / "touchdown.csv", ["r", "u"], zip(prof.grid.nodes, prof.u))
    if _want_svg(cfg, args):
        from .plotting import asymptotic_svg
        r = prof.grid.nodes
        sel = r <= 0.5
        law = const.coef(res.lambda_star) * r[sel] ** const.exponent
        asymptotic_svg(out / "shoot.svg", r[sel], 1.0 - prof.u[sel], law, const.exponent)
    print(f"T*={res.t_star:.12g} lambda*={res.lambda_star:.12g}")
    return EXIT_OK


def cmd_crosscheck(cfg, args):
    _gate(cfg, args, shooter=True)
    out = _outdir(cfg, args)
    est = _pullin(cfg, args)
    const, res = _shoot(cfg)
    lam_s = res.lambda_star
    disc = abs(lam_s - est.midpoint) / lam_s
    passed = disc <= args.threshold
    payload = {"pullin": est.as_dict(), "lambda_shoot": lam_s, "relative_discrepancy": disc,
               "threshold": args.threshold, "pass": passed}
    write_json(out / "crosscheck.json", payload, cfg)
    print(f"bisection midpoint={est.midpoint:.10g} shooting={lam_s:.10g} discrepancy={disc:.3%} "
          f"-> {'pass' if passed else 'FAIL'}")
    return EXIT_OK if passed else EXIT_FAIL


COMMANDS = {
    "validate": cmd_validate, "solve": cmd_solve, "pullin": cmd_pullin, "branch": cmd_branch,
    "asymptotics": cmd_asymptotics, "shoot": cmd_shoot, "crosscheck": cmd_crosscheck,
}


def build_parser():
    ap = argparse.ArgumentParser(prog="touchdown", description=__doc__.splitlines()[0])
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("--config", required=True, help="run configuration file")
    ap.add_argument("--lambda", dest="lam", type=float, help="voltage parameter")
    ap.add_argument("--width", type=float, help="target bisection bracket width")
    ap.add_argument("--lambdas", help="sweep grid: 'start:stop:count' or a comma list")
    ap.add_argument("--jobs", type=int, default=1, help="concurrent sweep workers")
    ap.add_argument("--out", help="output directory (overrides [output] dir)")
    ap.add_argument("--svg", action="store_true", help="also write SVG plots")
    ap.add_argument("--threshold", type=float, default=0.02, help="crosscheck relative tolerance")
    ap.add_argument("--shooter", action="store_true", help="validate: require the asymptotic hypotheses")
    ap.add_argument("--force", action="store_true", help="run even if hypotheses fail")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except ConfigError as exc:
        print(f"configuration error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CommandFailed, InconsistentBracket, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
