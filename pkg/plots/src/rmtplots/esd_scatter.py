"""ESD eigenvalue scatter with the unit circle overlay.

Input schema: esd CSV (trial, k, re, im).
"""

import numpy as np

from .common import load_csv, new_figure, save_deterministic


def render(input_path, output_path, limits=None):
    rows = load_csv(input_path, ["trial", "k", "re", "im"])
    re = np.array([r["re"] for r in rows])
    im = np.array([r["im"] for r in rows])
    fig, ax = new_figure()
    ax.scatter(re, im, s=6, color="#1f5fa8", alpha=0.6, linewidths=0)
    phi = np.linspace(0.0, 2.0 * np.pi, 512)
    ax.plot(np.cos(phi), np.sin(phi), color="#c0392b", linewidth=1.2)
    lim = limits if limits is not None else 1.1 * max(
        1.0, float(np.max(np.hypot(re, im))))
    ax.set_xlim(-lim, lim)
    ax.set_ylim(-lim, lim)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title("eigenvalues vs unit circle")
    save_deterministic(fig, output_path)
    return output_path
