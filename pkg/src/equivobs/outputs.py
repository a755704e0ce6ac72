"""CSV, SVG and summary writers for simulation runs.

CSV columns, in order:

    t
    true_P_<i><j>      true pose, row-major
    true_V_<k>         true velocity, basis coordinates
    est_P_<i><j>       estimated pose
    est_V_<k>          estimated velocity
    lyapunov, lyapunov_rate, err_A_norm, err_a_norm,
    lift_deviation, A_norm, Ainv_norm,
    residual_P, residual_A, residual_Ahat

Floats are written with 17 significant digits so that parsing the file gives
back the logged doubles exactly.
"""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

import numpy as np

from .lie import MatrixLieGroup
from .sim import TrajectoryRecord

SCALAR_COLUMNS = ("lyapunov", "lyapunov_rate", "err_A_norm", "err_a_norm",
                  "lift_deviation", "A_norm", "Ainv_norm")
RESIDUAL_COLUMNS = ("residual_P", "residual_A", "residual_Ahat")


def csv_header(group: MatrixLieGroup) -> list[str]:
    n, d = group.n, group.dim
    cols = ["t"]
    for prefix in ("true", "est"):
        cols += [f"{prefix}_P_{i}{j}" for i in range(n) for j in range(n)]
        cols += [f"{prefix}_V_{k}" for k in range(d)]
    return cols + list(SCALAR_COLUMNS) + list(RESIDUAL_COLUMNS)


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def record_row(group: MatrixLieGroup, rec: TrajectoryRecord) -> list[float]:
    row = [rec.t]
    for state in (rec.true_state, rec.estimate):
        row += state.P.ravel().tolist()
        row += group.vee(state.V).tolist()
    row += [getattr(rec, c) for c in SCALAR_COLUMNS]
    row += [rec.residuals["P"], rec.residuals["A"], rec.residuals["Ahat"]]
    return row


def write_csv(path: Path, group: MatrixLieGroup, records: Sequence[TrajectoryRecord]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(csv_header(group))
        for rec in records:
            w.writerow([_fmt(v) for v in record_row(group, rec)])


def read_csv(path: str | Path) -> dict[str, np.ndarray]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    header, body = rows[0], np.array([[float(v) for v in r] for r in rows[1:]]).reshape(-1, len(rows[0]))
    return {name: body[:, i] for i, name in enumerate(header)}


def planar_track(group: MatrixLieGroup, P: np.ndarray) -> tuple[float, float]:
    """A 2-D point to plot for a pose: translation for homogeneous groups, else the first column."""
    if group.constraint == "se":
        return float(P[0, -1]), float(P[1, -1])
    return float(P[0, 0]), float(P[1, 0])


def _plot_svgs(out: Path, group: MatrixLieGroup, records: Sequence[TrajectoryRecord]) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "equivobs"
    meta = {"Date": None, "Creator": None}

    true_xy = np.array([planar_track(group, r.true_state.P) for r in records])
    est_xy = np.array([planar_track(group, r.estimate.P) for r in records])
    fig, ax = plt.subplots(figsize=(5, 5))
    for xy, colour, label in ((true_xy, "tab:blue", "true"), (est_xy, "tab:red", "observer")):
        ax.plot(xy[:, 0], xy[:, 1], color=colour, lw=1.2, label=label)
        ax.plot(*xy[0], marker="*", ms=12, color=colour, ls="none")
        ax.plot(*xy[-1], marker="o", ms=8, mfc="none", color=colour, ls="none")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best")
    fig.tight_layout()
    fig.savefig(out / "trajectory.svg", format="svg", metadata=meta)
    plt.close(fig)

    t = np.array([r.t for r in records])
    L = np.array([r.lyapunov for r in records])
    pos = L > 0
    fig, ax = plt.subplots(figsize=(6, 3.5))
    ax.plot(t[pos], np.log10(L[pos]), color="k", lw=1.2)
    ax.set_xlabel("t [s]")
    ax.set_ylabel("log10 L")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(out / "lyapunov.svg", format="svg", metadata=meta)
    plt.close(fig)


def log_lyapunov_slope(records: Sequence[TrajectoryRecord], t_start: float = 1.0) -> float | None:
    t = np.array([r.t for r in records])
    L = np.array([r.lyapunov for r in records])
    m = (t >= t_start) & (L > 0)
    if m.sum() < 2:
        return None
    return float(np.polyfit(t[m], np.log10(L[m]), 1)[0])


def summarize(records: Sequence[TrajectoryRecord]) -> dict:
    last = records[-1]
    return {
        "t_final": last.t,
        "records": len(records),
        "lyapunov_initial": records[0].lyapunov,
        "lyapunov_final": last.lyapunov,
        "err_A_norm_final": last.err_A_norm,
        "err_a_norm_final": last.err_a_norm,
        "log10_lyapunov_slope": log_lyapunov_slope(records),
        "max_constraint_residual": max(max(r.residuals.values()) for r in records),
        "max_lift_deviation": max(r.lift_deviation for r in records),
        "max_A_norm": max(r.A_norm for r in records),
        "max_Ainv_norm": max(r.Ainv_norm for r in records),
    }


def emit_outputs(records: Sequence[TrajectoryRecord], out_dir: str | Path, group: MatrixLieGroup,
                 plots: bool = True, extra_summary: dict | None = None) -> dict:
    """Write trajectory.csv, trajectory.svg, lyapunov.svg and summary.json into ``out_dir``."""
    if not records:
        raise ValueError("no records to write")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_csv(out / "trajectory.csv", group, records)
    if plots:
        _plot_svgs(out, group, records)
    summary = summarize(records)
    if extra_summary:
        summary.update(extra_summary)
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return summary
