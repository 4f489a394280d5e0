"""Serializers for traces, metrics, comparison reports and plots."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import plotting
from .sim import METRIC_NAMES, TRACE_COLUMNS, Comparison, Metrics, SimTrace

JOINT_NAMES = ("theta1 [rad]", "q2 [m]", "q3 [m]")


@dataclass
class RunArtifacts:
    trace_csv: Path
    metrics_csv: Path
    config_echo: Path
    plots: list[Path] = field(default_factory=list)


def write_trace_csv(trace: SimTrace, path) -> Path:
    path = Path(path)
    # %.17g round-trips doubles, so identical runs give identical files
    np.savetxt(path, trace.rows(), delimiter=",", fmt="%.17g", header=",".join(TRACE_COLUMNS), comments="")
    return path


def read_trace_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path) as fh:
        header = fh.readline().strip().split(",")
    return header, np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)


def _fmt(v) -> str:
    return "not_settled" if v is None else repr(float(v))


def write_metrics_csv(metrics: Metrics, path) -> Path:
    path = Path(path)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["joint", *METRIC_NAMES])
        for row in metrics.as_rows():
            w.writerow([row["joint"], *(_fmt(row[name]) for name in METRIC_NAMES)])
    return path


def write_plots(trace: SimTrace, outdir, prefix: str = "") -> list[Path]:
    outdir = Path(outdir)
    paths = []
    for j in range(3):
        paths.append(
            plotting.line_chart(
                outdir / f"{prefix}response_joint{j + 1}.svg",
                trace.t,
                {"q": trace.q[:, j], "q_d": trace.qd[:, j]},
                title=f"Joint {j + 1} response",
                xlabel="t [s]",
                ylabel=JOINT_NAMES[j],
            )
        )
        paths.append(
            plotting.line_chart(
                outdir / f"{prefix}error_joint{j + 1}.svg",
                trace.t,
                {"e": trace.e[:, j]},
                title=f"Joint {j + 1} tracking error",
                xlabel="t [s]",
                ylabel=f"e{j + 1}",
            )
        )
    return paths


def write_comparison(report: Comparison, outdir, label_a: str = "A", label_b: str = "B") -> tuple[Path, Path]:
    """Side-by-side table as CSV plus an aligned plain-text rendering."""
    outdir = Path(outdir)
    rows_a, rows_b = report.metrics_a.as_rows(), report.metrics_b.as_rows()
    table = []
    for name in METRIC_NAMES:
        for j in range(3):
            table.append([name, j + 1, _fmt(rows_a[j][name]), _fmt(rows_b[j][name]), repr(report.ratios[name][j])])
    table.append(["total_ise", "all", repr(report.metrics_a.total_ise), repr(report.metrics_b.total_ise), repr(report.total_ise_ratio)])

    csv_path = outdir / "comparison.csv"
    with open(csv_path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["metric", "joint", label_a, label_b, "ratio_a_over_b"])
        w.writerows(table)

    header = ["metric", "joint", label_a, label_b, "A/B"]
    cells = [header] + [[r[0], str(r[1]), *(_short(v) for v in r[2:])] for r in table]
    widths = [max(len(c[i]) for c in cells) for i in range(len(header))]
    lines = ["  ".join(c[i].ljust(widths[i]) for i in range(len(header))) for c in cells]
    lines.insert(1, "  ".join("-" * w for w in widths))
    txt_path = outdir / "comparison.txt"
    txt_path.write_text("\n".join(lines) + "\n")
    return csv_path, txt_path


def _short(v: str) -> str:
    try:
        return f"{float(v):.6g}"
    except ValueError:
        return v
