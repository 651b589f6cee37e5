"""Figure rendering for the CLI report path.

Every report-producing command can emit a PNG next to its delimited output;
all rendering is headless (Agg) and file-based.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def save_series_plot(path, x, series, xlabel, ylabel, logy=False, title=None):
    """One figure with the named series over a shared x axis."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for label, y in series.items():
        ax.plot(x, y, marker="o", markersize=3, linewidth=1.2, label=label)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if logy:
        ax.set_yscale("log")
    if len(series) > 1:
        ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_profile_plot(path, t, v, title=None):
    """Profile against both the log-radius and the radial variable."""
    import numpy as np

    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax1.plot(t, v, linewidth=1.2)
    ax1.set_xlabel("t = ln(1/r)")
    ax1.set_ylabel("v")
    ax1.grid(True, alpha=0.3)
    r = np.exp(-np.asarray(t))
    ax2.plot(r, v, linewidth=1.2)
    ax2.set_xlabel("r")
    ax2.grid(True, alpha=0.3)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
