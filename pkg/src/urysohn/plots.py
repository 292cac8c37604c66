"""Figures for the CLI reports, rendered off-screen to image files."""

from __future__ import annotations

from pathlib import Path
from typing import Mapping, Sequence

from matplotlib.figure import Figure

from .dyadic import Dyadic
from .interval import Interval


def distance_heatmap(matrix: Sequence[Sequence[Dyadic]], labels: Sequence[str], path, title: str = "") -> Path:
    """Save a heatmap of a square distance table with every value annotated."""
    n = len(labels)
    fig = Figure(figsize=(1.0 + 0.7 * n, 0.8 + 0.7 * n), layout="constrained")
    ax = fig.add_subplot()
    values = [[float(v) for v in row] for row in matrix]
    image = ax.imshow(values, cmap="viridis")
    ax.set_xticks(range(n), labels=labels, rotation=45 if n > 6 else 0)
    ax.set_yticks(range(n), labels=labels)
    if n <= 12:
        top = max((v for row in values for v in row), default=0.0)
        for i, row in enumerate(matrix):
            for j, v in enumerate(row):
                shade = "black" if top and float(v) > 0.6 * top else "white"
                ax.text(j, i, str(v).replace("/2^0", ""), ha="center", va="center", fontsize=7, color=shade)
    fig.colorbar(image, ax=ax, shrink=0.8, label="distance")
    if title:
        ax.set_title(title)
    return _save(fig, path)


def enclosure_plot(series: Mapping[str, Sequence[Interval]], path, title: str = "") -> Path:
    """Save enclosure intervals against precision, one error-bar series per name."""
    fig = Figure(figsize=(6.0, 3.6), layout="constrained")
    ax = fig.add_subplot()
    offsets = _offsets(len(series))
    for (name, intervals), dx in zip(series.items(), offsets):
        xs = [n + dx for n in range(len(intervals))]
        mids = [float(iv.lo + iv.hi) / 2 for iv in intervals]
        half = [float(iv.width) / 2 for iv in intervals]
        ax.errorbar(xs, mids, yerr=half, fmt="o", ms=3, capsize=3, label=name)
    ax.set_xlabel("precision n")
    ax.set_ylabel("enclosure")
    ax.grid(alpha=0.3)
    if series:
        ax.legend(frameon=False)
    if title:
        ax.set_title(title)
    return _save(fig, path)


def placement_plot(left: Sequence[Sequence[Dyadic]], right: Sequence[Sequence[Dyadic]], path, title: str = "") -> Path:
    """Save the distance tables of both sides of a back-and-forth run side by side."""
    n = len(left)
    fig = Figure(figsize=(2.0 + 1.0 * n, 1.2 + 0.5 * n), layout="constrained")
    axes = fig.subplots(1, 2)
    top = max((float(v) for row in list(left) + list(right) for v in row), default=1.0) or 1.0
    for ax, table, side in zip(axes, (left, right), ("left", "right")):
        image = ax.imshow([[float(v) for v in row] for row in table], cmap="viridis", vmin=0, vmax=top)
        ax.set_title(f"{side} placed points")
        ax.set_xticks(range(n))
        ax.set_yticks(range(n))
    fig.colorbar(image, ax=list(axes), shrink=0.8, label="distance")
    if title:
        fig.suptitle(title)
    return _save(fig, path)


def _offsets(count: int) -> list[float]:
    if count <= 1:
        return [0.0] * count
    return [-0.15 + 0.3 * k / (count - 1) for k in range(count)]


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, dpi=120)
    return path
