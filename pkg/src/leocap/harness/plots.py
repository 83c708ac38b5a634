"""SVG line charts over already-written CSV rows."""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from .experiments import REPORT_COLUMNS  # noqa: E402

_COLORS = {"SUPER_DINIC": "tab:red", "SUPER_DINIC_SP": "tab:green", "CPE": "tab:blue"}


def load_throughput_svg(rows: Sequence[Sequence[str]], dest: str | Path, title: str = "") -> None:
    """Two panels: throughput (Tbps) and mean path utilization (%) against load count.

    Rows of several timestamps are averaged per (method, load).
    """
    col = {c: i for i, c in enumerate(REPORT_COLUMNS)}
    acc: dict[str, dict[int, list[tuple[float, float]]]] = defaultdict(lambda: defaultdict(list))
    for r in rows:
        acc[r[col["method"]]][int(r[col["n_loads"]])].append(
            (float(r[col["throughput_gbps"]]) / 1000.0, float(r[col["mean_path_utilization"]]) * 100.0)
        )

    plt.rcParams["svg.hashsalt"] = "leocap"
    fig, (ax_t, ax_u) = plt.subplots(1, 2, figsize=(10, 4))
    for method, by_load in acc.items():
        loads = sorted(by_load)
        thp = [sum(v[0] for v in by_load[n]) / len(by_load[n]) for n in loads]
        util = [sum(v[1] for v in by_load[n]) / len(by_load[n]) for n in loads]
        color = _COLORS.get(method)
        ax_t.plot(loads, thp, marker="o", label=method, color=color)
        ax_u.plot(loads, util, marker="o", label=method, color=color)
    for ax in (ax_t, ax_u):
        ax.set_xscale("log")
        ax.set_xlabel("load count")
        ax.grid(True, alpha=0.3)
        ax.legend()
    ax_t.set_ylabel("throughput (Tbps)")
    ax_t.set_yscale("log")
    ax_u.set_ylabel("mean path utilization (%)")
    ax_u.set_yscale("log")
    ax_u.axhline(100.0, color="gray", linestyle="--", linewidth=0.8)
    if title:
        fig.suptitle(title)
    fig.tight_layout()
    fig.savefig(dest, format="svg", metadata={"Date": None})
    plt.close(fig)
