"""Figure rendering for the reporting subcommands.

Every function writes a file and returns None; the Agg backend keeps
rendering headless-safe.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def save_distance_histogram(distances, n: int, path) -> None:
    """Histogram of sampled pairwise Hamming distances with the n/2 and
    n/4 reference lines that frame the concentration effect."""
    distances = np.asarray(distances)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.hist(distances, bins=40, color="#4878a8", edgecolor="white")
    ax.axvline(n / 2, color="#b04030", linestyle="--", label="n/2 (indifferent)")
    ax.axvline(n / 4, color="#507840", linestyle=":", label="n/4 (very close)")
    ax.set_xlabel("Hamming distance")
    ax.set_ylabel("pairs")
    ax.set_title(f"Pairwise distances of random points, n={n}")
    ax.legend(loc="upper left")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_rank_shift(report, path) -> None:
    """Paired before/after analogy ranks, one line per probe; rising lines
    are relations the retrofit damaged."""
    fig, ax = plt.subplots(figsize=(6, 4))
    for result in report.probes:
        a, b, c, d = result.probe
        color = (
            "#b04030"
            if result.rank_after > result.rank_before
            else "#507840"
            if result.rank_after < result.rank_before
            else "#707070"
        )
        ax.plot(
            [0, 1],
            [result.rank_before, result.rank_after],
            marker="o",
            color=color,
            label=f"{a}:{b}::{c}:{d}",
        )
    ax.set_xticks([0, 1], ["before", "after"])
    ax.set_ylabel("rank of expected answer")
    ax.invert_yaxis()
    ax.set_title("Analogy rank shift under retrofitting")
    ax.legend(fontsize=7, loc="best")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
