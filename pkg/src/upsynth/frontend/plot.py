"""Scatter of region representatives over two parameters."""
from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def region_scatter(points, names, axes, path, title=None):
    """points: iterable of (valuation, label) with label in {"reach", "safe", None}."""
    i, j = (names.index(a) for a in axes)
    groups = {}
    for v, label in points:
        groups.setdefault(label, ([], []))
        groups[label][0].append(float(v[i]))
        groups[label][1].append(float(v[j]))
    style = {"reach": ("tab:red", "goal reachable"), "safe": ("tab:blue", "goal unreachable"),
             None: ("tab:gray", "region")}
    fig, ax = plt.subplots(figsize=(5, 5))
    for label, (xs, ys) in sorted(groups.items(), key=lambda kv: str(kv[0])):
        color, text = style.get(label, style[None])
        ax.scatter(xs, ys, s=12, c=color, label=f"{text} ({len(xs)})", alpha=0.7, linewidths=0)
    ax.set_xlabel(axes[0])
    ax.set_ylabel(axes[1])
    if title:
        ax.set_title(title)
    ax.legend(loc="best", fontsize=8)
    ax.set_aspect("equal", adjustable="datalim")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
