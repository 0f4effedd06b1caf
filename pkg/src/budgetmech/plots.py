"""Figure rendering for the CLI report paths.

Everything renders through the Agg backend straight to files; nothing here
opens a window. Figures are companions to the CSV reports, so they take the
same row objects the CSV writers do.
"""

from __future__ import annotations

from typing import Optional, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402


def _finite_ratios(rows) -> list[float]:
    return [float(r.ratio) for r in rows if r.ratio is not None]


def plot_ratio_histogram(rows: Sequence, path: str, title: str) -> None:
    """Histogram of approximation ratios from a bench ratio table."""
    ratios = _finite_ratios(rows)
    infinite = sum(1 for r in rows if r.ratio is None)
    fig, ax = plt.subplots(figsize=(7, 4.5))
    if ratios:
        ax.hist(ratios, bins=30, color="#4878d0", edgecolor="black", linewidth=0.4)
    ax.set_xlabel("opt / mechanism value")
    ax.set_ylabel("instances")
    label = title if not infinite else f"{title} ({infinite} infinite dropped)"
    ax.set_title(label)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


_REGION_COLORS = {"a": "#4878d0", "b": "#ee854a", "corner": "#d65f5f", "c1-sweep": "#6acc64"}


def plot_lb3(report, path: str) -> None:
    """Ratios over the lower-bound grid, plus region-a threshold payments."""
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(7, 7), sharex=False)
    for region in _REGION_COLORS:
        xs = [i for i, r in enumerate(report.rows) if r.region == region]
        ys = [float(r.ratio) for r in report.rows if r.region == region]
        if xs:
            top.scatter(xs, ys, s=18, label=region, color=_REGION_COLORS[region])
    top.axhline(1 + 2 ** 0.5, linestyle="--", color="gray", linewidth=0.8, label="1+sqrt2")
    top.set_xlabel("grid point")
    top.set_ylabel("opt / value")
    top.set_title("lower-bound family ratios")
    top.legend(fontsize=8)

    pa = [(float(r.costs[1]), float(r.p1)) for r in report.rows
          if r.region == "a" and r.p1 is not None]
    if pa:
        xs, ys = zip(*sorted(pa))
        bottom.plot(xs, ys, marker="o", markersize=3, color="#4878d0", label="p1(c2)")
        bottom.plot(xs, [1 - x for x in xs], linestyle="--", color="gray", label="1-c2")
    bottom.set_xlabel("c2")
    bottom.set_ylabel("threshold payment of agent 1")
    bottom.set_title("region a payment sweep")
    bottom.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_yao(points: Sequence, path: str, title: str) -> None:
    """Cost grid of the two-item distribution, colored by per-instance ratio.

    ``points`` are (cost1, cost2, ratio) triples; infinite ratios draw as
    hollow markers.
    """
    finite = [(float(a), float(b), float(r)) for a, b, r in points if r is not None]
    infinite = [(float(a), float(b)) for a, b, r in points if r is None]
    fig, ax = plt.subplots(figsize=(6.5, 5.5))
    if finite:
        xs, ys, cs = zip(*finite)
        sc = ax.scatter(xs, ys, c=cs, s=26, cmap="viridis")
        fig.colorbar(sc, ax=ax, label="opt / value")
    if infinite:
        xs, ys = zip(*infinite)
        ax.scatter(xs, ys, facecolors="none", edgecolors="red", s=30, label="infinite")
        ax.legend(fontsize=8)
    ax.set_xlabel("cost of item 1")
    ax.set_ylabel("cost of item 2")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
