"""Figure rendering for run traces.

Each figure pairs the relative distance with the speed response, the same
two views the trace CSV carries. Files only; no interactive backends.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402  (backend must be set first)


def plot_run(trace, title, path):
    """Render one run: gap over time on top, speeds below."""
    fig, (ax_gap, ax_speed) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    ax_gap.plot(trace.times, trace.gaps, color="tab:blue")
    ax_gap.set_ylabel("gap [m]")
    ax_gap.grid(True, alpha=0.3)
    ax_speed.plot(trace.times, trace.ego_speeds, color="tab:orange", label="ego")
    ax_speed.plot(trace.times, trace.lead_speeds, color="tab:gray", linestyle=":", label="lead")
    ax_speed.set_xlabel("time [s]")
    ax_speed.set_ylabel("speed [m/s]")
    ax_speed.grid(True, alpha=0.3)
    ax_speed.legend(loc="best", fontsize=8)
    ax_gap.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)


def plot_comparison(traces, labels, title, path):
    """Overlay several runs: gaps on top, ego speeds below (lead dotted)."""
    fig, (ax_gap, ax_speed) = plt.subplots(2, 1, figsize=(8, 6), sharex=True)
    for trace, label in zip(traces, labels):
        ax_gap.plot(trace.times, trace.gaps, label=label, linewidth=1.0)
        ax_speed.plot(trace.times, trace.ego_speeds, label=label, linewidth=1.0)
    ax_speed.plot(
        traces[0].times, traces[0].lead_speeds, color="tab:gray", linestyle=":",
        linewidth=1.0, label="lead",
    )
    ax_gap.set_ylabel("gap [m]")
    ax_gap.grid(True, alpha=0.3)
    ax_gap.legend(loc="best", fontsize=7)
    ax_speed.set_xlabel("time [s]")
    ax_speed.set_ylabel("speed [m/s]")
    ax_speed.grid(True, alpha=0.3)
    ax_speed.legend(loc="best", fontsize=7)
    ax_gap.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
