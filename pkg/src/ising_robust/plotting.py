"""Figure rendering for report outputs.

Report-producing CLI commands write these PNGs next to their delimited
output; the CSV stays the machine-readable contract and these are the
human-readable view. Uses the Agg backend so headless runs work.
"""
from __future__ import annotations

import math
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _stem(out_path) -> str:
    base, _ = os.path.splitext(str(out_path))
    return base


def _finite(pairs):
    return [(x, y) for x, y in pairs if math.isfinite(y)]


def save_experiment_figures(report, out_path) -> list[str]:
    """MSE and bias versus lambda, one curve per contamination scheme."""
    groups: dict[tuple[str, float], list] = {}
    for row in report.rows:
        groups.setdefault((row.contamination_kind, row.contamination_fraction), []).append(row)
    paths = []
    for metric in ("mse", "bias"):
        fig, ax = plt.subplots(figsize=(6.0, 4.0))
        for (kind, fraction), rows in groups.items():
            pts = _finite([(r.lam, getattr(r, metric)) for r in rows])
            if not pts:
                continue
            xs, ys = zip(*pts)
            ax.plot(xs, ys, marker="o", label=f"{kind} {fraction:g}")
        ax.set_xlabel("lambda")
        ax.set_ylabel(metric)
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)
        fig.tight_layout()
        path = f"{_stem(out_path)}_{metric}.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        paths.append(path)
    return paths


def save_ges_figure(curve, out_path) -> list[str]:
    """Gross error sensitivity versus lambda; ``curve`` is (lambda, GesResult) pairs."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = [lam for lam, _ in curve]
    ys = [res.ges for _, res in curve]
    ax.plot(xs, ys, marker="o", color="tab:red")
    ax.set_xlabel("lambda")
    ax.set_ylabel("gross error sensitivity")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = f"{_stem(out_path)}_ges.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]


def save_accuracy_figure(pairs, out_path) -> list[str]:
    """Prediction accuracy versus lambda; ``pairs`` is (lambda, accuracy)."""
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    xs = [lam for lam, _ in pairs]
    ys = [acc for _, acc in pairs]
    ax.plot(xs, ys, marker="o", color="tab:green")
    ax.set_xlabel("lambda")
    ax.set_ylabel("accuracy")
    ax.set_ylim(0.0, 1.0)
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    path = f"{_stem(out_path)}_accuracy.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return [path]
