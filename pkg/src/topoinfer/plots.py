"""Figure rendering for experiment reports.

Uses the Agg backend so runs never need a display.  Two files per
report: a rate summary against the bound and target, and a per-trial
view of complex size and wall time.
"""

from __future__ import annotations

import math
from typing import List

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt


def render_figures(report: dict, output_prefix: str) -> List[str]:
    """Write <prefix>.rates.png and <prefix>.trials.png, return paths."""
    paths = []
    paths.append(_rates_figure(report, f"{output_prefix}.rates.png"))
    paths.append(_trials_figure(report, f"{output_prefix}.trials.png"))
    return paths


def _rates_figure(report: dict, path: str) -> str:
    cfg = report["config"]
    trials = max(1, int(cfg["trials"]))
    p = float(cfg["p"])
    g = float(report["bound"]["g"])
    hom_floor = p - 3.0 * math.sqrt(p * (1.0 - p) / trials)
    den_floor = g - 3.0 * math.sqrt(0.25 / trials)

    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    labels = ["density", "homology"]
    values = [report["empirical_density_rate"], report["empirical_homology_rate"]]
    colors = ["#4878d0", "#6acc64"]
    ax.bar(labels, values, color=colors, width=0.55)
    ax.axhline(p, color="#555555", linestyle="--", linewidth=1.0, label=f"target p = {p:g}")
    ax.axhline(g, color="#4878d0", linestyle=":", linewidth=1.2, label=f"bound g = {g:.3f}")
    ax.axhline(hom_floor, color="#6acc64", linestyle=":", linewidth=1.2,
               label=f"homology floor = {hom_floor:.3f}")
    if den_floor > 0.0:
        ax.axhline(den_floor, color="#d65f5f", linestyle=":", linewidth=1.0,
                   label=f"density floor = {den_floor:.3f}")
    ax.set_ylim(0.0, 1.05)
    ax.set_ylabel("empirical rate")
    ax.set_title(
        f"{cfg['model']} {cfg['regime']} eps={cfg['eps']:g} l={report['l']} "
        f"({trials} trials, verdict: {report['verdict']})"
    )
    ax.legend(loc="lower right", fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def _trials_figure(report: dict, path: str) -> str:
    records = report["trials"]
    idx = [r["trial"] for r in records]
    sizes = [max(r["simplices"], 0) for r in records]
    match_color = ["#6acc64" if r["match"] else "#d65f5f" for r in records]
    dense_marker = ["o" if r["dense"] else "x" for r in records]

    fig, ax = plt.subplots(figsize=(6.8, 4.0))
    for i, s, c, m in zip(idx, sizes, match_color, dense_marker):
        ax.scatter([i], [s], color=c, marker=m, s=28)
    ax.set_xlabel("trial")
    ax.set_ylabel("simplices")
    if sizes and max(sizes) > 0 and max(sizes) > 50 * max(1, min(s for s in sizes if s > 0)):
        ax.set_yscale("log")
    ax.set_title("per-trial complex size (green=match, red=mismatch, x=not dense)")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
