"""Universality-distance trend across matrix sizes.

Input schema: comparisons CSV (trial, n, value).
"""

import numpy as np

from .common import load_csv, new_figure, save_deterministic


def render(input_path, output_path, limits=None):
    rows = load_csv(input_path, ["trial", "n", "value"])
    sizes = sorted({int(r["n"]) for r in rows})
    medians, q1s, q3s = [], [], []
    fig, ax = new_figure()
    for n in sizes:
        vals = np.abs([r["value"] for r in rows if int(r["n"]) == n])
        q1, med, q3 = np.percentile(vals, [25, 50, 75])
        medians.append(med)
        q1s.append(q1)
        q3s.append(q3)
        ax.scatter([n] * vals.size, vals, s=8, color="#1f5fa8", alpha=0.35,
                   linewidths=0)
    ax.plot(sizes, medians, color="#c0392b", marker="s", markersize=5,
            linewidth=1.4, label="median")
    ax.fill_between(sizes, q1s, q3s, color="#c0392b", alpha=0.15,
                    label="interquartile range")
    ax.set_xscale("log", base=2)
    if limits is not None:
        ax.set_ylim(*limits)
    ax.set_xlabel("n")
    ax.set_ylabel("|distance|")
    ax.set_title("universality distance vs n")
    ax.legend(loc="upper right", fontsize=8)
    save_deterministic(fig, output_path)
    return output_path
