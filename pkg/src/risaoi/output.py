"""CSV and SVG writers for sweep results. Floats use 6 significant digits."""
from __future__ import annotations

import csv
import os

SUMMARY_HEADER = ["axis_value", "scheme", "mean_sum_rate", "sd_sum_rate", "mean_rate_per_slot",
                  "mean_system_aoi", "sd_system_aoi", "feasible_fraction", "mean_bcd_iters"]
DETAIL_HEADER = ["axis_value", "scheme", "realization", "sum_rate", "rate_per_slot",
                 "system_aoi", "feasible", "n_demodulable", "mean_bcd_iters"]
UE_AOI_HEADER = ["axis_value", "scheme", "ue", "mean_aoi"]


def fmt(x):
    if isinstance(x, str):
        return x
    if isinstance(x, bool):
        return str(int(x))
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.6g}"


def _write(path, header, rows):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(header)
        for row in rows:
            out.writerow([fmt(v) for v in row])


def write_summary(result, path):
    rows = [[v, s] + [m[k] for k in SUMMARY_HEADER[2:]] for v, s, m in result.rows()]
    _write(path, SUMMARY_HEADER, rows)


def write_detail(result, path):
    rows = []
    for v in result.values:
        for s in result.schemes:
            for i, r in enumerate(result.results[(v, s)]):
                iters = sum(r.bcd_iterations) / len(r.bcd_iterations) if r.bcd_iterations else 0.0
                rows.append([v, s, i, r.sum_rate, r.avg_sum_rate_per_slot, r.system_aoi,
                             r.feasible, len(r.profile.k_u), iters])
    _write(path, DETAIL_HEADER, rows)


def write_ue_aoi(result, path):
    rows = []
    for v, s, m in result.rows():
        if m["mean_ue_aoi"] is None:
            continue
        for k, a in enumerate(m["mean_ue_aoi"], start=1):
            rows.append([v, s, k, a])
    _write(path, UE_AOI_HEADER, rows)


def write_svg(result, path, metric="mean_sum_rate", xlabel=None):
    """Line plot of one summary metric versus the axis value, one line per scheme."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    summ = result.summary()
    fig, ax = plt.subplots(figsize=(5, 3.6))
    for s in result.schemes:
        ax.plot(result.values, [summ[(v, s)][metric] for v in result.values], marker="o", label=s)
    ax.set_xlabel(xlabel or result.axis)
    ax.set_ylabel(metric)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def write_all(result, outdir, stem, metric="mean_sum_rate", svg=True):
    os.makedirs(outdir, exist_ok=True)
    paths = {
        "summary": os.path.join(outdir, f"{stem}.csv"),
        "detail": os.path.join(outdir, f"{stem}_detail.csv"),
        "ue_aoi": os.path.join(outdir, f"{stem}_ue_aoi.csv"),
    }
    write_summary(result, paths["summary"])
    write_detail(result, paths["detail"])
    write_ue_aoi(result, paths["ue_aoi"])
    if svg:
        paths["svg"] = os.path.join(outdir, f"{stem}.svg")
        write_svg(result, paths["svg"], metric)
    return paths
