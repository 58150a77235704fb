"""Static SVG figures.  Output is byte-stable across runs."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

plt.rcParams["svg.hashsalt"] = "touchdown"
plt.rcParams["svg.fonttype"] = "path"


def _save(fig, path):
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def profile_svg(path, r, u, title="u(r)"):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(r, u, lw=1.2)
    ax.set_xlabel("r")
    ax.set_ylabel("u")
    ax.set_title(title)
    fig.tight_layout()
    _save(fig, path)


def branch_svg(path, lam, u0, converged):
    lam, u0, converged = map(np.asarray, (lam, u0, converged))
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(lam[converged], u0[converged], "o-", ms=3, label="converged")
    if np.any(~converged):
        ax.plot(lam[~converged], np.minimum(u0[~converged], 1.0), "x", color="C3", label="touchdown / indeterminate")
    ax.set_xlabel("lambda")
    ax.set_ylabel("u(0)")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    _save(fig, path)


def asymptotic_svg(path, r, gap_computed, gap_law, exponent):
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.loglog(r, gap_computed, lw=1.4, label="1 - u* (shooting)")
    ax.loglog(r, gap_law, "--", lw=1.0, label=f"leading law, exponent {exponent:.6g}")
    ax.set_xlabel("r")
    ax.set_ylabel("1 - u")
    ax.legend(fontsize=8)
    fig.tight_layout()
    _save(fig, path)
