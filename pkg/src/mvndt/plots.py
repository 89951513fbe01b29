"""Figure rendering for the CLI report paths (headless Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .metrics import ErrorReport
from .registration import IterationRecord


def save_trace_figure(records: list[IterationRecord], path) -> Path:
    """Convergence figure: likelihood gain over iterations plus step norms."""
    path = Path(path)
    iters = [r.iteration for r in records]
    gain = [r.log_likelihood - records[0].log_likelihood for r in records]
    steps = [max(r.step_norms) for r in records]

    fig, (ax_top, ax_bottom) = plt.subplots(2, 1, figsize=(6.4, 6.0), sharex=True)
    ax_top.plot(iters, gain, marker=".", color="tab:blue")
    ax_top.set_ylabel("log-likelihood $-$ initial")
    ax_top.grid(alpha=0.3)

    ax_bottom.plot(iters, steps, marker=".", color="tab:orange")
    if any(s > 0.0 for s in steps):
        ax_bottom.set_yscale("log")
    ax_bottom.set_ylabel("max twist step norm")
    ax_bottom.set_xlabel("iteration")
    ax_bottom.grid(alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def save_error_figure(report: ErrorReport, path) -> Path:
    """Per-scan rotation/translation error bars with the mean marked."""
    path = Path(path)
    labels = [e.scan for e in report.per_scan]
    x = range(len(labels))

    fig, (ax_rot, ax_trans) = plt.subplots(1, 2, figsize=(9.0, 3.6))
    ax_rot.bar(x, [e.rotation_angle for e in report.per_scan], color="tab:blue")
    ax_rot.axhline(report.rotation_error, color="k", linestyle="--", linewidth=1,
                   label=f"mean {report.rotation_error:.3g}")
    ax_rot.set_ylabel("rotation error [rad]")
    ax_rot.legend(fontsize=8)

    ax_trans.bar(x, [e.translation_distance for e in report.per_scan], color="tab:orange")
    ax_trans.axhline(report.translation_error, color="k", linestyle="--", linewidth=1,
                     label=f"mean {report.translation_error:.3g}")
    ax_trans.set_ylabel("translation error")
    ax_trans.legend(fontsize=8)

    for ax in (ax_rot, ax_trans):
        ax.set_xticks(list(x))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
        ax.set_xlabel("scan")
        ax.grid(axis="y", alpha=0.3)

    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
