"""Command-line interface: range, width2, make, verify, search, report.

Exit codes: 0 success, 1 usage/IO error, 2 when `verify` finds a sound
inequality violation (the interesting outcome). All outputs are
deterministic given flags + seed and embed provenance (tool version, config,
seed, input digests).
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .blockpos import sample_random
from .config import RunConfig, load_runconfig, thread_cap
from .ellwidth import delta2_estimate
from .errors import BlocknormError, UsageError
from .explore import SearchBudget, scan_q38, search_conj33, search_q26
from .matrixio import complex_to_pair, digest, load_matrix, matrix_to_obj, save_matrix
from .numrange import range_summary
from .report import render_report
from .verify import ALL_STATEMENTS, batch_verify


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _provenance(cfg: RunConfig, seed: int, inputs: dict | None = None) -> dict:
    return {
        "tool": "blocknorm",
        "version": __version__,
        "config": cfg.as_dict(),
        "seed": seed,
        "inputs": inputs or {},
    }


def _parse_p_grid(text: str) -> tuple:
    out = []
    for tok in text.split(","):
        tok = tok.strip()
        if not tok:
            continue
        out.append(math.inf if tok.lower() == "inf" else float(tok))
    if not out:
        raise UsageError("empty p-grid")
    return tuple(out)


def _parse_complex(text: str) -> complex:
    re, _, im = text.partition(",")
    try:
        return complex(float(re), float(im or 0.0))
    except ValueError as exc:
        raise UsageError(f"bad complex value {text!r} (want 're,im')") from exc


def _dump(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=1)
        fh.write("\n")


def _cmd_range(args, cfg: RunConfig) -> int:
    x = load_matrix(args.infile)
    summary = range_summary(x, args.grid)
    obj = {
        "schema": "rangesummary/1",
        "width": summary.width,
        "inradius": summary.inradius,
        "indiameter": summary.indiameter,
        "chebyshev_center": complex_to_pair(summary.chebyshev_center),
        "dist_zero": summary.dist_zero,
        "grid_size": len(summary.theta_grid),
        "boundary": [[float(t), float(p.real), float(p.imag), float(h)]
                     for t, p, h in zip(summary.theta_grid, summary.boundary_points,
                                        summary.support_values)],
        "provenance": _provenance(cfg, cfg.default_seed, {"in": digest(x)}),
    }
    _dump(args.out, obj)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write("theta,re,im,h\n")
            for t, p, h in zip(summary.theta_grid, summary.boundary_points,
                               summary.support_values):
                fh.write(f"{float(t)!r},{float(p.real)!r},{float(p.imag)!r},{float(h)!r}\n")
    print(f"range: width={summary.width:.9g} inradius={summary.inradius:.9g} "
          f"dist_zero={summary.dist_zero:.9g} -> {args.out}")
    return 0


def _cmd_width2(args, cfg: RunConfig) -> int:
    x = load_matrix(args.infile)
    est = delta2_estimate(x, restarts=args.restarts, seed=args.seed)
    obj = {
        "schema": "delta2estimate/1",
        "value": est.value,
        "best_frame": {
            "u": [complex_to_pair(z) for z in est.best_frame.u],
            "v": [complex_to_pair(z) for z in est.best_frame.v],
        },
        "restarts_used": est.restarts_used,
        "certificates": est.certificates,
        "provenance": _provenance(cfg, args.seed, {"in": digest(x)}),
    }
    _dump(args.out, obj)
    print(f"width2: delta2 >= {est.value:.9g} ({est.restarts_used} restarts) -> {args.out}")
    return 0


_KIND_ALIASES = {
    "general": "general",
    "normal": "normal_offdiag",
    "normal_offdiag": "normal_offdiag",
    "essherm": "essentially_hermitian_offdiag",
    "essentially_hermitian_offdiag": "essentially_hermitian_offdiag",
    "unitary": "unitary_offdiag",
    "unitary_offdiag": "unitary_offdiag",
}


def _cmd_make(args, cfg: RunConfig) -> int:
    kind = _KIND_ALIASES.get(args.kind)
    if kind is None:
        raise UsageError(f"unknown kind {args.kind!r}; choose from {sorted(set(_KIND_ALIASES))}")
    written = []
    for i in range(args.count):
        bp = sample_random(args.n, kind, seed=args.seed + i, r=args.r,
                           center=_parse_complex(args.center))
        obj = {
            "A": matrix_to_obj(bp.a_block),
            "X": matrix_to_obj(bp.x_block),
            "B": matrix_to_obj(bp.b_block),
            "provenance": _provenance(cfg, args.seed + i),
        }
        path = args.out if args.count == 1 else _indexed(args.out, i)
        _dump(path, obj)
        written.append(str(path))
    print(f"make: wrote {len(written)} instance(s): {', '.join(written)}")
    return 0


def _indexed(path, i: int):
    p = Path(path)
    return p.with_name(f"{p.stem}_{i:04d}{p.suffix}")


def _cmd_verify(args, cfg: RunConfig) -> int:
    statements = ([s.strip().upper() for s in args.statement.split(",")]
                  if args.statement.lower() != "all" else list(ALL_STATEMENTS))
    n_list = [int(v) for v in args.n.split(",")]
    p_grid = _parse_p_grid(args.p_grid) if args.p_grid else cfg.p_grid
    result = batch_verify(statements, n_list, args.trials, args.seed,
                          p_grid=p_grid, grid_size=cfg.theta_grid,
                          max_workers=thread_cap())
    prov = _provenance(cfg, args.seed)
    _dump(args.out, result.to_obj(prov))
    if args.csv:
        result.write_csv(args.csv)
    for row in result.summary:
        print(f"verify {row['statement']}: {row['reports']} reports, "
              f"{row['violations']} violations, min slack {row['min_slack']:.3e}, "
              f"{row['tight']} tight")
    if result.violations > 0:
        print(f"verify: {result.violations} SOUND VIOLATION(S) found", file=sys.stderr)
        return 2
    print(f"verify: 0 violations across {len(result.reports)} reports -> {args.out}")
    return 0


def _cmd_search(args, cfg: RunConfig) -> int:
    budget = SearchBudget(restarts=args.restarts, iters_per_restart=args.iters,
                          seed=args.seed, n=args.n, time_limit_s=args.time_limit)
    if args.target == "q26":
        result = search_q26(args.r, args.n, args.j, budget,
                            checkpoint_path=args.checkpoint)
        _dump(args.out, result.to_obj(_provenance(cfg, args.seed)))
        print(f"search q26: best gap {result.best_value:.9g} (cap r={args.r}) -> {args.out}")
    elif args.target == "conj33":
        if not args.infile:
            raise UsageError("search --target conj33 requires --in X.json")
        x = load_matrix(args.infile)
        result = search_conj33(x, budget, checkpoint_path=args.checkpoint)
        _dump(args.out, result.to_obj(_provenance(cfg, args.seed, {"in": digest(x)})))
        print(f"search conj33: best ratio {result.best_value:.9g} -> {args.out}")
    elif args.target == "q38":
        p_grid = _parse_p_grid(args.p_grid) if args.p_grid else cfg.p_grid
        table = scan_q38(p_grid, args.n, args.trials, args.seed)
        table["provenance"] = _provenance(cfg, args.seed)
        _dump(args.out, table)
        if args.csv:
            with open(args.csv, "w", encoding="utf-8") as fh:
                fh.write("p,max_ratio,argmax_trial,exceed_count\n")
                for row in table["table"]:
                    fh.write(f"{row['p']},{row['max_ratio']!r},"
                             f"{row['argmax_trial']},{row['exceed_count']}\n")
        worst = max(table["table"], key=lambda r: r["max_ratio"])
        print(f"search q38: max ratio {worst['max_ratio']:.9g} at p={worst['p']} -> {args.out}")
    else:
        raise UsageError(f"unknown search target {args.target!r}")
    return 0


def _cmd_report(args, cfg: RunConfig) -> int:
    written = []
    for f in args.infiles:
        written.extend(render_report(f, args.out_dir))
    print("report: wrote " + ", ".join(str(p) for p in written))
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="blocknorm", description=__doc__)
    parser.add_argument("--config", help="runconfig/1 JSON file")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("range", help="numerical-range geometry of a matrix")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--grid", type=int, default=720)
    p.add_argument("--out", required=True)
    p.add_argument("--csv", help="also write the boundary polygon as CSV")

    p = sub.add_parser("width2", help="elliptical width (delta2) estimate")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("make", help="generate random positive block instances")
    p.add_argument("--kind", default="general")
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--center", default="0,0")
    p.add_argument("--count", type=int, default=1)
    p.add_argument("--out", required=True)

    p = sub.add_parser("verify", help="margin-reporting inequality verification")
    p.add_argument("--statement", default="all")
    p.add_argument("--n", default="2,3,4")
    p.add_argument("--trials", type=int, default=50)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--p-grid", dest="p_grid")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")

    p = sub.add_parser("search", help="extremal searches for the open problems")
    p.add_argument("--target", required=True, choices=["q26", "conj33", "q38"])
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--j", type=int, default=0)
    p.add_argument("--p-grid", dest="p_grid")
    p.add_argument("--restarts", type=int, default=64)
    p.add_argument("--iters", type=int, default=500)
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--time-limit", type=float, default=None)
    p.add_argument("--in", dest="infile")
    p.add_argument("--checkpoint")
    p.add_argument("--out", required=True)
    p.add_argument("--csv")

    p = sub.add_parser("report", help="render figures + CSVs from JSON outputs")
    p.add_argument("--in", dest="infiles", nargs="+", required=True)
    p.add_argument("--out-dir", default="reports")

    return parser


_COMMANDS = {
    "range": _cmd_range,
    "width2": _cmd_width2,
    "make": _cmd_make,
    "verify": _cmd_verify,
    "search": _cmd_search,
    "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_runconfig(args.config) if args.config else RunConfig()
        return _COMMANDS[args.command](args, cfg)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    except (BlocknormError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
