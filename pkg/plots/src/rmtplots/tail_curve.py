"""Smallest-singular-value tail curves with the eps^2 reference line.

Input schema: tail CSV (n, eps, trials, prob, stderr).
"""

import numpy as np

from .common import load_csv, new_figure, save_deterministic


def render(input_path, output_path, limits=None):
    rows = load_csv(input_path, ["n", "eps", "trials", "prob", "stderr"])
    fig, ax = new_figure()
    for n in sorted({int(r["n"]) for r in rows}):
        sub = sorted((r for r in rows if int(r["n"]) == n),
                     key=lambda r: r["eps"])
        eps = np.array([r["eps"] for r in sub])
        prob = np.array([r["prob"] for r in sub])
        err = np.array([r["stderr"] for r in sub])
        ax.errorbar(eps, prob, yerr=3.0 * err, marker="o", markersize=4,
                    linewidth=1.0, capsize=2, label=f"n = {n}")
    eps_ref = np.geomspace(min(r["eps"] for r in rows),
                           max(r["eps"] for r in rows), 64)
    ax.plot(eps_ref, eps_ref**2, linestyle="--", color="#555555",
            linewidth=1.0, label="eps^2 reference")
    ax.set_xscale("log")
    ax.set_yscale("log")
    if limits is not None:
        ax.set_ylim(*limits)
    ax.set_xlabel("eps")
    ax.set_ylabel("P(s_n <= eps / sqrt(n))")
    ax.set_title("smallest singular value tail")
    ax.legend(loc="upper left", fontsize=8)
    save_deterministic(fig, output_path)
    return output_path
