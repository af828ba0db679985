"""Figure rendering for CLI reports.

Everything draws to a file through the Agg backend; nothing here opens a
window.  One generic series renderer covers every experiment.
"""

from __future__ import annotations

from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

_RC = {
    "figure.figsize": (6.0, 3.7),
    "axes.grid": True,
    "grid.alpha": 0.4,
    "grid.linestyle": "--",
    "font.size": 10,
}


def render_series(
    xs: Sequence[float],
    ys: Sequence[float],
    xlabel: str,
    ylabel: str,
    title: str,
    path: str,
) -> str:
    """Plot one (x, y) series and save it; returns the written path."""
    with plt.rc_context(_RC):
        fig, ax = plt.subplots()
        marker = "o" if len(xs) <= 64 else None
        ax.plot(xs, ys, marker=marker, markersize=3, linewidth=1.2)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.set_title(title)
        fig.tight_layout()
        fig.savefig(path, dpi=150)
        plt.close(fig)
    return path
