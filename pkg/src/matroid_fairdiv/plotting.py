"""Figures written next to CLI reports (``--figure PATH``)."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {
    "font.size": 9,
    "axes.labelsize": 9,
    "legend.fontsize": 8,
    "xtick.labelsize": 8,
    "ytick.labelsize": 8,
    "axes.spines.top": False,
    "axes.spines.right": False,
}


def _save(fig, path: str) -> None:
    # no Software/date metadata so the same report gives the same bytes
    kwargs = {"metadata": {"Software": None}} if str(path).endswith(".png") else {}
    fig.savefig(path, dpi=150, bbox_inches="tight", **kwargs)
    plt.close(fig)


def _bars(ax, labels, series):
    x = np.arange(len(labels))
    width = 0.8 / len(series)
    for k, (name, vals, color) in enumerate(series):
        ax.bar(x + (k - (len(series) - 1) / 2) * width, vals, width, label=name, color=color)
    ax.set_xticks(x)
    ax.set_xticklabels(labels)
    ax.yaxis.get_major_locator().set_params(integer=True)
    ax.legend(frameon=False, loc="upper left", bbox_to_anchor=(1.0, 1.0))


def plot_solve(report: dict, path: str) -> None:
    """Bar chart of each agent's value against its maximin share."""
    n = report["n"]
    labels = [str(i) for i in range(n)]
    series = [("value", report["values"], "#3b6ea5")]
    if report.get("shares"):
        series.append(("share", report["shares"]["values"], "#c8c8c8"))
    elif report.get("pair_shares"):
        worst = [0] * n
        for rec in report["pair_shares"]:
            worst[rec["i"]] = max(worst[rec["i"]], rec["mu"])
        series.append(("max pairwise share", worst, "#c8c8c8"))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(max(3.0, 0.6 * n + 2), 2.6))
        _bars(ax, labels, series)
        ax.set_xlabel("agent")
        ax.set_ylabel("value")
        ax.set_title(f"{report['algorithm'].upper()}  welfare {report['welfare']}", fontsize=9)
        _save(fig, path)


def plot_shares(k: int, fast: list[int], brute: list[int] | None, path: str) -> None:
    n = len(fast)
    series = [("fast", fast, "#3b6ea5")]
    if brute is not None:
        series.append(("brute force", brute, "#d08c3a"))
    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(max(3.0, 0.6 * n + 2), 2.6))
        _bars(ax, [str(i) for i in range(n)], series)
        ax.set_xlabel("agent")
        ax.set_ylabel(f"maximin share, k={k}")
        _save(fig, path)
