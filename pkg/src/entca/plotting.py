"""Figure output for size-prediction curves (written to files, never shown)."""

from __future__ import annotations

from typing import Mapping, Optional, Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

STYLE = {
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "figure.figsize": (6.0, 4.0),
    "savefig.dpi": 150,
}


def plot_curves(series: Mapping[str, Sequence[tuple[int, int]]], path: str, t: int, v: int,
                best_known: Optional[Sequence[tuple[int, int]]] = None) -> None:
    """Array size N against k (log axis), one line per route, plus the
    best-known sizes as points when given."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for label, pts in series.items():
            ks, ns = zip(*pts)
            ax.plot(ks, ns, drawstyle="steps-post", label=f"predicted ({label})")
        if best_known:
            ks, ns = zip(*best_known)
            ax.plot(ks, ns, "k.", ms=3, label="best known")
        ax.set_xscale("log")
        ax.set_xlabel("k (columns)")
        ax.set_ylabel("N (rows)")
        ax.set_title(f"t={t}, v={v}")
        ax.legend(loc="upper left")
        ax.grid(True, which="major", alpha=0.3)
        fig.tight_layout()
        fig.savefig(path)
        plt.close(fig)
