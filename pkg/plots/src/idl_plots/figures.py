"""Post-hoc figures from inviscid-damping-lab CSV files.

Reads only the documented CSV schemas (never snapshots or live state), so a
checked-in fixture is enough to exercise every figure kind.  Rendering is a
pure function of the CSV bytes and the figure spec; vector output is
bit-stable across re-renders.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

matplotlib.rcParams["svg.hashsalt"] = "idl-plots"

FIGURE_KINDS = (
    "decay_fit",
    "echo_timeline",
    "highfreq_cascade",
    "toy_scaling",
    "lambda_curve",
)

REQUIRED_COLUMNS = {
    "decay_fit": ("t", "ux_fluct_l2", "uy_l2"),
    "echo_timeline": ("t", "uy_l2", "marker"),
    "highfreq_cascade": ("t", "highfreq_frac"),
    "toy_scaling": ("eta", "sqrt_eta", "log_total"),
    "lambda_curve": ("t", "lambda_val"),
}


class SchemaError(ValueError):
    """CSV is missing columns the figure kind requires."""


@dataclass(frozen=True)
class FigureSpec:
    input_csv: Path
    figure_kind: str
    output_path: Path
    fit_window: tuple | None = None

    def __post_init__(self):
        if self.figure_kind not in FIGURE_KINDS:
            raise ValueError(
                f"figure_kind must be one of {FIGURE_KINDS}, got {self.figure_kind!r}"
            )


def read_table(path, required):
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise SchemaError(
                f"{Path(path).name} is missing required columns: {', '.join(missing)}"
            )
        rows = list(reader)
    return header, rows


def loglog_fit(points):
    """OLS slope and r^2 of log(value) on log(t); same normal equations the
    simulation harness uses for its decay fits."""
    if len(points) < 5:
        raise ValueError(f"decay fit needs at least 5 points, got {len(points)}")
    if any(t <= 0 or v <= 0 for t, v in points):
        raise ValueError("decay fit needs positive t and values")
    x = [math.log(t) for t, _ in points]
    y = [math.log(v) for _, v in points]
    xbar = sum(x) / len(x)
    ybar = sum(y) / len(y)
    xm = [xi - xbar for xi in x]
    ym = [yi - ybar for yi in y]
    sxx = sum(v * v for v in xm)
    slope = sum(a * b for a, b in zip(xm, ym)) / sxx
    resid = [b - slope * a for a, b in zip(xm, ym)]
    ss_tot = sum(v * v for v in ym)
    ss_res = sum(v * v for v in resid)
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return slope, r2


def linear_fit(x, y):
    xbar = sum(x) / len(x)
    ybar = sum(y) / len(y)
    xm = [v - xbar for v in x]
    sxx = sum(v * v for v in xm)
    slope = sum(a * (b - ybar) for a, b in zip(xm, y)) / sxx
    return slope, ybar - slope * xbar


def _save(fig, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, metadata={"Date": None} if path.suffix == ".svg" else None)
    plt.close(fig)


def _float_rows(rows, cols):
    out = []
    for row in rows:
        try:
            out.append(tuple(float(row[c]) for c in cols))
        except (TypeError, ValueError):
            continue
    return out


def render(spec: FigureSpec) -> dict:
    """Write the figure; returns the annotation values (fits, markers)."""
    _, rows = read_table(spec.input_csv, REQUIRED_COLUMNS[spec.figure_kind])
    annotations = {}
    fig, ax = plt.subplots(figsize=(6.0, 4.0))

    if spec.figure_kind == "decay_fit":
        window = spec.fit_window or (10.0, float("inf"))
        for col, color in (("ux_fluct_l2", "tab:blue"), ("uy_l2", "tab:orange")):
            pts = _float_rows(rows, ("t", col))
            pos = [(t, v) for t, v in pts if t > 0 and v > 0]
            if pos:
                ax.loglog(*zip(*pos), color=color, label=col)
            fit_pts = [(t, v) for t, v in pos if window[0] <= t <= window[1]]
            if len(fit_pts) >= 5:
                slope, r2 = loglog_fit(fit_pts)
                annotations[col] = {"slope": slope, "r2": r2}
                t0, t1 = fit_pts[0][0], fit_pts[-1][0]
                v0 = fit_pts[0][1]
                ax.loglog(
                    [t0, t1], [v0, v0 * (t1 / t0) ** slope],
                    "--", color=color, linewidth=0.8,
                )
                ax.annotate(
                    f"{col}: slope {slope:.3f} (r$^2$={r2:.4f})",
                    xy=(0.05, 0.12 if col == "uy_l2" else 0.05),
                    xycoords="axes fraction", fontsize=8, color=color,
                )
        ax.set_xlabel("t")
        ax.set_ylabel("L2 norm")
        ax.set_title("velocity decay")
        if rows:
            ax.legend(fontsize=8)

    elif spec.figure_kind == "echo_timeline":
        pts = _float_rows(rows, ("t", "uy_l2"))
        if pts:
            ax.semilogy(*zip(*pts), color="tab:blue")
        markers = [float(r["marker"]) for r in rows if r.get("marker")]
        for tm in markers:
            ax.axvline(tm, color="tab:red", linestyle=":", linewidth=0.9)
        annotations["markers"] = markers
        ax.set_xlabel("t")
        ax.set_ylabel("||Uy||_2")
        ax.set_title("vertical energy bursts at critical times")

    elif spec.figure_kind == "highfreq_cascade":
        pts = _float_rows(rows, ("t", "highfreq_frac"))
        if pts:
            ax.plot(*zip(*pts), color="tab:green")
        ax.set_ylim(0.0, 1.0)
        ax.set_xlabel("t")
        ax.set_ylabel("enstrophy fraction above cutoff")
        ax.set_title("cascade past a fixed frequency")

    elif spec.figure_kind == "toy_scaling":
        pts = [
            (float(r["sqrt_eta"]), float(r["log_total"]))
            for r in rows
            if r.get("eta") and r.get("sqrt_eta") and r.get("log_total")
        ]
        if pts:
            x, y = zip(*pts)
            ax.plot(x, y, "o", color="tab:blue")
            if len(pts) >= 2:
                slope, intercept = linear_fit(list(x), list(y))
                annotations["slope"] = slope
                xs = [min(x), max(x)]
                ax.plot(xs, [slope * v + intercept for v in xs], "--", color="tab:blue")
                ax.annotate(
                    f"log(total) ~ {slope:.3f} sqrt(eta)",
                    xy=(0.05, 0.9), xycoords="axes fraction", fontsize=9,
                )
        ax.set_xlabel("sqrt(eta)")
        ax.set_ylabel("log total amplification")
        ax.set_title("echo-chain amplification scaling")

    else:  # lambda_curve
        pts = _float_rows(rows, ("t", "lambda_val"))
        pos = [(t, v) for t, v in pts if t > 0]
        if pos:
            ax.semilogx(*zip(*pos), color="tab:purple")
        ax.set_xlabel("t")
        ax.set_ylabel("lambda(t)")
        ax.set_title("regularity index decay")

    _save(fig, spec.output_path)
    return annotations
