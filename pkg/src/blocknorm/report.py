"""Render figures and delimited summaries from the tool's JSON outputs.

Dispatches on the "schema" field: rangesummary/1 gets a boundary plot with
the inscribed Chebyshev disc, delta2estimate/1 a certificate bar chart,
marginreport/1 slack histograms and a per-statement summary, searchresult/1
the best-so-far history, q38table/1 the ratio-vs-p curve. Every figure is
written next to a CSV carrying the same numbers.
"""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .errors import UsageError  # noqa: E402


def _save(fig, path: Path) -> Path:
    fig.savefig(path, dpi=150, bbox_inches="tight")
    plt.close(fig)
    return path


def _write_csv(path: Path, header, rows) -> Path:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        w.writerows(rows)
    return path


def _range_figure(obj: dict, stem: str, out_dir: Path) -> list[Path]:
    boundary = obj.get("boundary", [])
    thetas = [row[0] for row in boundary]
    xs = [row[1] for row in boundary]
    ys = [row[2] for row in boundary]
    hs = [row[3] for row in boundary]
    cx, cy = obj["chebyshev_center"]
    rad = obj["inradius"]
    fig, ax = plt.subplots(figsize=(5.5, 5.5))
    if xs:
        ax.plot(xs + xs[:1], ys + ys[:1], "-", lw=1.2, label="boundary of W(X)")
    if rad > 0:
        circle = plt.Circle((cx, cy), rad, fill=False, color="tab:red", ls="--",
                            label=f"inscribed disc r={rad:.4g}")
        ax.add_patch(circle)
    ax.plot([cx], [cy], "+", color="tab:red", ms=10)
    ax.set_aspect("equal")
    ax.set_xlabel("Re")
    ax.set_ylabel("Im")
    ax.set_title(f"width={obj['width']:.4g}  indiameter={obj['indiameter']:.4g}  "
                 f"d(0,W)={obj['dist_zero']:.4g}")
    ax.legend(loc="best", fontsize=8)
    paths = [_save(fig, out_dir / f"{stem}_range.png")]
    if boundary:
        paths.append(_write_csv(out_dir / f"{stem}_boundary.csv",
                                ["theta", "re", "im", "h"],
                                zip(thetas, xs, ys, hs)))
    return paths


def _delta2_figure(obj: dict, stem: str, out_dir: Path) -> list[Path]:
    certs = {k: v for k, v in obj["certificates"].items() if isinstance(v, (int, float))}
    names = list(certs)
    vals = [certs[k] for k in names]
    fig, ax = plt.subplots(figsize=(max(5.0, 0.8 * len(names)), 4.0))
    ax.bar(range(len(names)), vals, color="tab:blue", label="certificates")
    ax.axhline(obj["value"], color="tab:red", ls="--",
               label=f"delta2 estimate = {obj['value']:.6g}")
    ax.set_xticks(range(len(names)))
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("lower bound")
    ax.legend(fontsize=8)
    paths = [_save(fig, out_dir / f"{stem}_delta2.png")]
    paths.append(_write_csv(out_dir / f"{stem}_certificates.csv",
                            ["certificate", "value"],
                            [(k, v) for k, v in certs.items()]))
    return paths


def _margin_figure(obj: dict, stem: str, out_dir: Path) -> list[Path]:
    reports = obj.get("reports", [])
    stmts = sorted({r["statement"] for r in reports})
    paths = []
    if reports:
        fig, ax = plt.subplots(figsize=(7.0, 4.0))
        for s in stmts:
            slacks = [r["slack"] for r in reports if r["statement"] == s and r["sound"]]
            if slacks:
                ax.hist(slacks, bins=40, histtype="step", label=s)
        ax.axvline(0.0, color="k", lw=0.8)
        ax.set_xlabel("slack (rhs - lhs)")
        ax.set_ylabel("count")
        ax.set_yscale("log")
        ax.legend(fontsize=7)
        ax.set_title(f"{len(reports)} reports, {obj.get('violations', 0)} violations")
        paths.append(_save(fig, out_dir / f"{stem}_slacks.png"))
    rows = [(s["statement"], s["reports"], s["violations"], s["min_slack"], s["tight"])
            for s in obj.get("summary", [])]
    paths.append(_write_csv(out_dir / f"{stem}_summary.csv",
                            ["statement", "reports", "violations", "min_slack", "tight"],
                            rows))
    return paths


def _search_figure(obj: dict, stem: str, out_dir: Path) -> list[Path]:
    hist = obj.get("history", [])
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    if hist:
        ax.step([h[0] for h in hist], [h[1] for h in hist], where="post")
    ax.set_xlabel("evaluation")
    ax.set_ylabel("best objective")
    ax.set_title(f"{obj['objective_name']}: best = {obj['best_value']:.8g}")
    paths = [_save(fig, out_dir / f"{stem}_history.png")]
    paths.append(_write_csv(out_dir / f"{stem}_history.csv",
                            ["iteration", "best_value"], hist))
    return paths


def _q38_figure(obj: dict, stem: str, out_dir: Path) -> list[Path]:
    table = obj["table"]
    labels = [str(row["p"]) for row in table]
    ratios = [row["max_ratio"] for row in table]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.plot(range(len(labels)), ratios, "o-")
    ax.axhline(1.0, color="k", lw=0.8, ls="--")
    ax.set_xticks(range(len(labels)))
    ax.set_xticklabels(labels)
    ax.set_xlabel("Schatten p")
    ax.set_ylabel("max ratio ||block||_p / ||A+B||_p")
    ax.set_title(f"n={obj['n']}, {obj['trials']} normal instances")
    paths = [_save(fig, out_dir / f"{stem}_q38.png")]
    paths.append(_write_csv(out_dir / f"{stem}_q38.csv",
                            ["p", "max_ratio", "argmax_trial", "exceed_count"],
                            [(row["p"], row["max_ratio"], row["argmax_trial"],
                              row["exceed_count"]) for row in table]))
    return paths


_RENDERERS = {
    "rangesummary/1": _range_figure,
    "delta2estimate/1": _delta2_figure,
    "marginreport/1": _margin_figure,
    "searchresult/1": _search_figure,
    "q38table/1": _q38_figure,
}


def render_report(in_path, out_dir) -> list[Path]:
    """Figures + CSVs for one JSON output file; returns the written paths."""
    in_path = Path(in_path)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(in_path, "r", encoding="utf-8") as fh:
        obj = json.load(fh)
    schema = obj.get("schema")
    renderer = _RENDERERS.get(schema)
    if renderer is None:
        raise UsageError(f"{in_path}: unknown or missing schema {schema!r}")
    return renderer(obj, in_path.stem, out_dir)
