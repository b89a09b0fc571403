"""Figure rendering for sweep output."""

from __future__ import annotations

import math

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

_SERIES = (
    ("leaf_window_bits", "leaf window"),
    ("ledger_bits", "ledger"),
    ("stack_bits", "stack tokens"),
    ("scratch_bits", "scratch"),
    ("field_bits", "field registers"),
)


def render_sweep(rows, out_path: str) -> str:
    """Plot peak workspace (bits) per category and in total against b,
    log-log, with a marker at b = ceil(sqrt(t)). Returns out_path."""
    if not rows:
        raise ValueError("no sweep rows to plot")
    t = rows[0]["t"]
    bs = [r["b"] for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key, label in _SERIES:
        ax.plot(bs, [max(1, r[key]) for r in rows], marker=".", label=label)
    ax.plot(bs, [r["total_bits"] for r in rows], marker="o", color="black",
            linewidth=2, label="total")
    ax.axvline(math.ceil(math.sqrt(t)), color="gray", linestyle="--",
               label=r"$b=\lceil\sqrt{t}\rceil$")
    ax.set_xscale("log", base=2)
    ax.set_yscale("log", base=2)
    ax.set_xlabel("block size b")
    ax.set_ylabel("peak workspace (bits)")
    ax.set_title(f"workspace vs block size, t={t}")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=150)
    plt.close(fig)
    return out_path
