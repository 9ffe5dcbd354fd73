"""Failure-rate-vs-overhead figures: a gnuplot script and a matplotlib render."""

from __future__ import annotations

import os
from typing import Sequence

from .simulator import COLUMNS, ResultRow

# gnuplot point types / matplotlib markers per distribution family
GNUPLOT_POINTS = {"robust-0": 8, "robust-1": 10, "raptor": 6, "novel": 3, "random-linear": 4}
MPL_MARKERS = {"robust-0": "^", "robust-1": "v", "raptor": "o", "novel": "*", "random-linear": "s"}


def _series(rows: Sequence[ResultRow]) -> list[str]:
    seen: list[str] = []
    for r in rows:
        if r.distribution not in seen:
            seen.append(r.distribution)
    return seen


def _style_key(label: str, robust_seen: list[str]) -> str:
    if label.startswith("robust-soliton"):
        if label not in robust_seen:
            robust_seen.append(label)
        return f"robust-{min(robust_seen.index(label), 1)}"
    if label.startswith("random-linear"):
        return "random-linear"
    return label if label in GNUPLOT_POINTS else "raptor"


def _q_values(rows: Sequence[ResultRow]) -> list[int]:
    return sorted({r.q for r in rows})


def emit_plot_script(rows: Sequence[ResultRow], destination, csv_path) -> None:
    """Write a gnuplot script with one log-y panel per q, reading ``csv_path``.

    The CSV is referenced relative to the script's directory.
    """
    if not rows:
        raise ValueError("no rows to plot")
    qs = _q_values(rows)
    labels = _series(rows)
    script_dir = os.path.dirname(os.path.abspath(destination))
    rel = os.path.relpath(os.path.abspath(csv_path), script_dir)
    col = {c: i + 1 for i, c in enumerate(COLUMNS)}
    cols = (len(qs) + 1) // 2 if len(qs) > 1 else 1
    nrows = (len(qs) + cols - 1) // cols
    out = [
        "# failure rate vs overhead, one panel per field size",
        "set datafile separator ','",
        "set terminal pngcairo size 1000,800",
        f"set output '{os.path.splitext(os.path.basename(destination))[0]}.png'",
        "set logscale y",
        "set xlabel 'overhead'",
        "set ylabel 'failure rate'",
        "set key bottom left",
        f"set multiplot layout {nrows},{cols}",
    ]
    robust_seen: list[str] = []
    styles = {lab: GNUPLOT_POINTS[_style_key(lab, robust_seen)] for lab in labels}
    for q in qs:
        out.append(f"set title 'q={q}'")
        plots = []
        for lab in labels:
            expr = (f"(strcol({col['distribution']}) eq '{lab}' && ${col['q']} == {q} "
                    f"&& ${col['failure_rate']} > 0 ? ${col['failure_rate']} : 1/0)")
            plots.append(f"'{rel}' every ::1 using {col['epsilon']}:{expr} "
                         f"with linespoints pt {styles[lab]} title '{lab}'")
        out.append("plot " + ", \\\n     ".join(plots))
    out.append("unset multiplot")
    with open(destination, "w") as fh:
        fh.write("\n".join(out) + "\n")


def render_figure(rows: Sequence[ResultRow], destination) -> None:
    """Render the same panels to an image file with matplotlib."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    if not rows:
        raise ValueError("no rows to plot")
    qs = _q_values(rows)
    labels = _series(rows)
    ncols = 2 if len(qs) > 1 else 1
    nrows = (len(qs) + ncols - 1) // ncols
    fig, axes = plt.subplots(nrows, ncols, figsize=(5 * ncols, 3.6 * nrows), squeeze=False)
    robust_seen: list[str] = []
    markers = {lab: MPL_MARKERS[_style_key(lab, robust_seen)] for lab in labels}
    for ax, q in zip(axes.flat, qs):
        for lab in labels:
            pts = sorted((r.epsilon, r.failure_rate, r.std_err) for r in rows
                         if r.q == q and r.distribution == lab)
            pts = [p for p in pts if p[1] > 0]
            if not pts:
                continue
            x, y, e = zip(*pts)
            ax.errorbar(x, y, yerr=[min(v, s) for v, s in zip(y, e)], marker=markers[lab],
                        capsize=2, lw=1, ms=6, label=lab)
        ax.set_yscale("log")
        ax.set_title(f"q={q}")
        ax.set_xlabel("overhead")
        ax.set_ylabel("failure rate")
        ax.grid(True, which="both", alpha=0.3)
    for ax in list(axes.flat)[len(qs):]:
        ax.set_visible(False)
    axes.flat[0].legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(destination, dpi=120)
    plt.close(fig)
