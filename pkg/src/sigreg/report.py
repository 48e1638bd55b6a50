"""Rendering experiment results to files.

Each report lands as a machine-readable CSV, an aligned plain-text table, and
a PNG figure next to them. Wall-clock numbers go to their own timings.csv so
that everything else is byte-stable for a fixed seed. Floats are written with
repr (shortest round-trip form), which keeps re-parsed reports exactly equal
to the in-memory ones.
"""

from __future__ import annotations

import csv
import os

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "write_crossval_report",
    "write_diffusion_report",
    "write_fit_report",
    "read_metrics_csv",
    "text_table",
]


def _fmt(x):
    if isinstance(x, float):
        return repr(x)
    return str(x)


def text_table(headers, rows):
    """Simple aligned columns; numbers shortened for reading, not parsing."""
    disp = [
        [f"{v:.6g}" if isinstance(v, float) else str(v) for v in row]
        for row in rows
    ]
    widths = [
        max(len(h), *(len(r[i]) for r in disp)) if disp else len(h)
        for i, h in enumerate(headers)
    ]
    lines = [
        "  ".join(h.ljust(w) for h, w in zip(headers, widths)),
        "  ".join("-" * w for w in widths),
    ]
    for r in disp:
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)))
    return "\n".join(lines) + "\n"


def _write_csv(path, headers, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(headers)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _write_table(outdir, stem, headers, rows, fmt):
    path = os.path.join(outdir, f"{stem}.csv")
    _write_csv(path, headers, rows)
    if fmt == "text":
        with open(os.path.join(outdir, f"{stem}.txt"), "w") as fh:
            fh.write(text_table(headers, rows))
    return path


def _save_fig(fig, path):
    fig.savefig(path, dpi=150)
    plt.close(fig)


def write_crossval_report(report, outdir, fmt="csv"):
    """metrics/folds/timings tables plus the per-fold error figure."""
    os.makedirs(outdir, exist_ok=True)
    metric_rows = [
        [
            r.name,
            float(r.mse_mean),
            float(r.mse_std),
            float(r.r2),
            float(r.adjusted_r2),
            len(r.fold_mse),
        ]
        for r in report.results
    ]
    _write_table(
        outdir,
        "metrics",
        ["model", "mse_cv_mean", "mse_cv_std", "r2", "adjusted_r2", "folds"],
        metric_rows,
        fmt,
    )
    fold_rows = []
    for r in report.results:
        for f, mse in enumerate(r.fold_mse):
            fold_rows.append([f, r.name, float(mse)])
    _write_table(outdir, "folds", ["fold", "model", "mse"], fold_rows, fmt)
    _write_csv(
        os.path.join(outdir, "timings.csv"),
        ["model", "seconds"],
        [[r.name, float(r.seconds)] for r in report.results],
    )
    fig, ax = plt.subplots(figsize=(7, 4))
    for r in report.results:
        ax.plot(np.arange(len(r.fold_mse)), r.fold_mse, marker="o", label=r.name)
    ax.set_xlabel("repetition")
    ax.set_ylabel("holdout MSE vs true mean")
    ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    if report.results:
        ax.legend()
    fig.tight_layout()
    _save_fig(fig, os.path.join(outdir, "folds_mse.png"))


def write_diffusion_report(report, outdir, fmt="csv"):
    os.makedirs(outdir, exist_ok=True)
    rows = [[d, float(r)] for d, r in zip(report.degrees, report.r2)]
    _write_table(outdir, "diffusion", ["degree", "r2_backtest"], rows, fmt)
    fig, axes = plt.subplots(1, 2, figsize=(10, 4))
    axes[0].plot(report.degrees, report.r2, marker="o")
    axes[0].set_xlabel("signature degree")
    axes[0].set_ylabel("backtest R2")
    axes[0].set_xticks(report.degrees)
    axes[0].grid(True, alpha=0.3)
    if report.predictions is not None:
        axes[1].scatter(report.actual, report.predictions, s=8, alpha=0.5)
        lo = float(min(report.actual.min(), report.predictions.min()))
        hi = float(max(report.actual.max(), report.predictions.max()))
        axes[1].plot([lo, hi], [lo, hi], color="k", lw=1)
        axes[1].set_xlabel("terminal value")
        axes[1].set_ylabel(f"prediction (degree {report.degrees[-1]})")
        axes[1].grid(True, alpha=0.3)
    fig.tight_layout()
    _save_fig(fig, os.path.join(outdir, "diffusion.png"))


def write_fit_report(stats_rows, outdir, fmt="csv", scatter=None):
    """Fit diagnostics table; optional predicted-vs-actual scatter figure.

    stats_rows: list of [target, r2, adjusted_r2, residual_variance].
    scatter: (actual, predicted) arrays for the figure, or None.
    """
    os.makedirs(outdir, exist_ok=True)
    _write_table(
        outdir,
        "fit_report",
        ["target", "r2", "adjusted_r2", "residual_variance"],
        stats_rows,
        fmt,
    )
    if scatter is not None:
        actual, predicted = scatter
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.scatter(actual, predicted, s=8, alpha=0.5)
        lo = float(min(np.min(actual), np.min(predicted)))
        hi = float(max(np.max(actual), np.max(predicted)))
        ax.plot([lo, hi], [lo, hi], color="k", lw=1)
        ax.set_xlabel("observed next value")
        ax.set_ylabel("fitted mean")
        ax.grid(True, alpha=0.3)
        fig.tight_layout()
        _save_fig(fig, os.path.join(outdir, "fit_scatter.png"))


def read_metrics_csv(path):
    """Parse a metrics.csv back into {model: {column: value}}."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        headers = next(reader)
        out = {}
        for row in reader:
            rec = dict(zip(headers, row))
            name = rec.pop("model")
            out[name] = {
                k: (int(v) if k == "folds" else float(v)) for k, v in rec.items()
            }
    return out
