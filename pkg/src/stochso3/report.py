"""CSV time series, per-seed metrics and the key-value summary report."""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

SERIES_COLUMNS = (
    "t", "err_dist",
    "rho_err_x", "rho_err_y", "rho_err_z",
    "bhat_x", "bhat_y", "bhat_z",
    "sigmahat_x", "sigmahat_y", "sigmahat_z",
    "phi_true", "theta_true", "psi_true",
    "phi_est", "theta_est", "psi_est",
    "validity_flag",
)
METRIC_COLUMNS = ("filter", "seed", "mean_err_dist", "std_err_dist", "final_err_dist",
                  "convergence_time_to_0p01", "first_passage_0p01")


def fmt(x) -> str:
    """17 significant digits: enough to round-trip a double."""
    if x is None:
        return "none"
    return f"{float(x):.17g}"


def write_series_csv(series, path) -> None:
    cols = np.column_stack([
        series.t, series.err_dist, series.rho_err, series.b_hat, series.sigma_hat,
        series.euler_true, series.euler_est,
    ])
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SERIES_COLUMNS)
        for row, ok in zip(cols, series.valid):
            w.writerow([fmt(x) for x in row] + ["1" if ok else "0"])


def read_series_csv(path) -> dict:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], rows[1:]
    data = np.array([[float(x) for x in r] for r in body]) if body else np.empty((0, len(header)))
    return {name: data[:, i] for i, name in enumerate(header)}


def write_metrics_csv(report: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(METRIC_COLUMNS)
        for f, ms in report["metrics"].items():
            for seed, m in zip(report["seeds"], ms):
                w.writerow([f, seed, fmt(m.mean_err_dist), fmt(m.std_err_dist), fmt(m.final_err_dist),
                            fmt(m.convergence_time_to_0p01), fmt(m.first_passage_0p01)])


def summary_lines(report: dict, label: str = "") -> list[str]:
    """Machine-readable ``key = value`` lines for a Monte-Carlo report."""
    seeds = report["seeds"]
    lines = []
    if label:
        lines.append(f"scenario = {label}")
    lines.append(f"seeds = {' '.join(str(s) for s in seeds)}")
    lines.append(f"window = {fmt(report['window'][0])} {fmt(report['window'][1])}")
    for f, ms in report["metrics"].items():
        means = np.array([m.mean_err_dist for m in ms])
        stds = np.array([m.std_err_dist for m in ms])
        first = [m.first_passage_0p01 for m in ms]
        settled = [m.convergence_time_to_0p01 for m in ms]
        lines += [
            f"{f}.mean_err_dist.mean = {fmt(means.mean())}",
            f"{f}.mean_err_dist.median = {fmt(np.median(means))}",
            f"{f}.mean_err_dist.min = {fmt(means.min())}",
            f"{f}.mean_err_dist.max = {fmt(means.max())}",
            f"{f}.std_err_dist.mean = {fmt(stds.mean())}",
            f"{f}.std_err_dist.median = {fmt(np.median(stds))}",
            f"{f}.reached_0p01_by_5s = {sum(x is not None and x <= 5.0 for x in first)}/{len(ms)}",
            f"{f}.settled_0p01_by_5s = {sum(x is not None and x <= 5.0 for x in settled)}/{len(ms)}",
        ]
    names = list(report["metrics"])
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            da = np.array([m.mean_err_dist for m in report["metrics"][a]])
            db = np.array([m.mean_err_dist for m in report["metrics"][b]])
            lines += [
                f"paired.{b}_minus_{a}.mean_err_dist.mean = {fmt((db - da).mean())}",
                f"paired.{b}_below_{a}.seeds = {int(np.sum(db < da))}/{len(seeds)}",
            ]
    return lines


def write_summary(report: dict, path, label: str = "") -> None:
    Path(path).write_text("\n".join(summary_lines(report, label)) + "\n")
