"""Figures for bigraded tables (Kh, EKh), written with the Agg backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def table_figure(entries: dict, path, xlabel: str = "i", ylabel: str = "q", title: str = ""):
    """Grid plot of a bigraded table; ``entries`` maps (x, y) to a short string.

    Occupied cells are shaded and labelled with their entry.  Returns the path.
    """
    xs = sorted({x for x, _ in entries}) or [0]
    ys = sorted({y for _, y in entries}) or [0]
    x0, x1 = xs[0], xs[-1]
    y0, y1 = ys[0], ys[-1]
    ystep = 2 if all((y - y0) % 2 == 0 for y in ys) else 1
    nx = x1 - x0 + 1
    ny = (y1 - y0) // ystep + 1
    fig, ax = plt.subplots(figsize=(max(3.0, 0.7 * nx + 1.5), max(2.5, 0.45 * ny + 1.5)))
    for (x, y), text in sorted(entries.items()):
        row = (y - y0) // ystep
        ax.add_patch(plt.Rectangle((x - x0 - 0.5, row - 0.5), 1, 1, color="#d8e4f0"))
        ax.text(x - x0, row, str(text), ha="center", va="center", fontsize=8)
    ax.set_xlim(-0.5, nx - 0.5)
    ax.set_ylim(-0.5, ny - 0.5)
    ax.set_xticks(range(nx))
    ax.set_xticklabels([str(x0 + k) for k in range(nx)])
    ax.set_yticks(range(ny))
    ax.set_yticklabels([str(y0 + k * ystep) for k in range(ny)])
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.grid(True, color="#eeeeee", linewidth=0.5)
    ax.set_axisbelow(True)
    if title:
        ax.set_title(title, fontsize=10)
    fig.tight_layout()
    # no timestamp / version metadata so that files are byte-stable
    fig.savefig(path, dpi=100, metadata={"Software": None})
    plt.close(fig)
    return path


def kh_figure(hom: dict, path, title: str = "Kh"):
    """Plot {(i, q): group-string-or-dim}."""
    return table_figure({k: v for k, v in hom.items() if v not in (0, "0", "")}, path, "i", "q", title)


def ekh_figure(table: dict, path, title: str = "EKh"):
    """Plot {(j, q): dim}."""
    return table_figure({k: v for k, v in table.items() if v}, path, "j", "q", title)
