"""Centralized numerical tolerances and the run configuration record."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass, field

from .errors import UsageError


@dataclass(frozen=True)
class Tolerances:
    """All tolerances used by the package.

    Relative tolerances multiply (1 + scale) where scale is a norm of the
    operand; absolute ones are used as-is.
    """

    symmetry: float = 1e-10        # Hermitian check, relative
    psd: float = 1e-10             # min-eigenvalue PSD predicate, relative
    assemble_psd: float = 1e-9     # block-matrix PSD acceptance, relative
    reconstruction: float = 1e-9   # decomposition residuals, relative
    decomposition: float = 1e-10   # unitarity of factors, absolute-ish
    inequality: float = 1e-8       # verifier slack threshold, relative
    tight: float = 1e-6            # near-equality bookkeeping, relative
    degenerate_width: float = 1e-10  # below this the range is a segment/point
    frame_orthonormal: float = 1e-10


DEFAULT_TOL = Tolerances()

_RUNCONFIG_SCHEMA = "runconfig/1"
_KNOWN_KEYS = {"schema", "tolerances", "default_seed", "output_dir", "p_grid", "theta_grid"}


@dataclass
class RunConfig:
    """CLI-level configuration; echoed into every output file for provenance."""

    tolerances: Tolerances = DEFAULT_TOL
    default_seed: int = 1
    output_dir: str = "."
    p_grid: tuple = (1.0, 1.5, 2.0, 4.0, float("inf"))
    theta_grid: int = 720

    def as_dict(self) -> dict:
        return {
            "schema": _RUNCONFIG_SCHEMA,
            "tolerances": dataclasses.asdict(self.tolerances),
            "default_seed": self.default_seed,
            "output_dir": self.output_dir,
            "p_grid": ["inf" if p == float("inf") else p for p in self.p_grid],
            "theta_grid": self.theta_grid,
        }


def load_runconfig(path: str) -> RunConfig:
    """Parse a runconfig/1 JSON file, rejecting unknown keys."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise UsageError(f"{path}: config must be a JSON object")
    unknown = set(raw) - _KNOWN_KEYS
    if unknown:
        raise UsageError(f"{path}: unknown config keys {sorted(unknown)}")
    if raw.get("schema", _RUNCONFIG_SCHEMA) != _RUNCONFIG_SCHEMA:
        raise UsageError(f"{path}: unsupported schema {raw.get('schema')!r}")
    cfg = RunConfig()
    if "tolerances" in raw:
        known_tols = {f.name for f in dataclasses.fields(Tolerances)}
        bad = set(raw["tolerances"]) - known_tols
        if bad:
            raise UsageError(f"{path}: unknown tolerance keys {sorted(bad)}")
        cfg.tolerances = dataclasses.replace(DEFAULT_TOL, **{k: float(v) for k, v in raw["tolerances"].items()})
    if "default_seed" in raw:
        cfg.default_seed = int(raw["default_seed"])
    if "output_dir" in raw:
        cfg.output_dir = str(raw["output_dir"])
    if "p_grid" in raw:
        cfg.p_grid = tuple(float("inf") if p == "inf" else float(p) for p in raw["p_grid"])
    if "theta_grid" in raw:
        cfg.theta_grid = int(raw["theta_grid"])
    return cfg


def thread_cap() -> int:
    """Worker cap from BLOCKNORM_THREADS (default 1); outputs never depend on it."""
    raw = os.environ.get("BLOCKNORM_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise UsageError(f"BLOCKNORM_THREADS={raw!r} is not an integer")
    return max(1, cap)
