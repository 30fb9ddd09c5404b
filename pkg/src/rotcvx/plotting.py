"""Figures for the CLI report path (matplotlib, non-interactive backend)."""
from __future__ import annotations

import numpy as np
from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

__all__ = ["image_figure", "save_image_figure"]


def image_figure(points, labels=("<A, X>", "<B, X>"), title=None) -> Figure:
    """Closed polygon through the support points with the points marked."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    fig = Figure(figsize=(4.5, 4.5))
    FigureCanvasAgg(fig)
    ax = fig.add_subplot(1, 1, 1)
    closed = np.vstack([pts, pts[:1]])
    ax.fill(closed[:, 0], closed[:, 1], color="tab:blue", alpha=0.15, lw=0)
    ax.plot(closed[:, 0], closed[:, 1], color="tab:blue", lw=1.2)
    ax.plot(pts[:, 0], pts[:, 1], ".", color="tab:blue", ms=3)
    ax.set_aspect("equal", adjustable="datalim")
    ax.set_xlabel(labels[0])
    ax.set_ylabel(labels[1])
    ax.grid(True, lw=0.4, alpha=0.5)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    return fig


def save_image_figure(points, path, dpi: int = 150, **kwargs) -> None:
    image_figure(points, **kwargs).savefig(path, dpi=dpi)
