"""Matrix (de)serialization: the shared JSON wire format and input digests.

Format: {"rows": n, "cols": m, "data": [[re, im], ...]} row-major. Reals are
written with Python's shortest-round-trip float repr, so emitted files
re-parse to bit-identical 64-bit values.
"""

from __future__ import annotations

import hashlib
import json
from typing import Any

import numpy as np

from .errors import NonFinite, UsageError


def matrix_to_obj(x: np.ndarray) -> dict:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2:
        raise UsageError(f"expected a 2-D matrix, got shape {x.shape}")
    data = [[float(v.real), float(v.imag)] for v in x.ravel(order="C")]
    return {"rows": int(x.shape[0]), "cols": int(x.shape[1]), "data": data}


def matrix_from_obj(obj: dict) -> np.ndarray:
    try:
        rows, cols, data = int(obj["rows"]), int(obj["cols"]), obj["data"]
    except (KeyError, TypeError) as exc:
        raise UsageError(f"malformed matrix object: {exc}") from exc
    if rows < 0 or cols < 0 or len(data) != rows * cols:
        raise UsageError(f"matrix data length {len(data)} != rows*cols = {rows * cols}")
    flat = np.array([complex(re, im) for re, im in data], dtype=complex)
    x = flat.reshape(rows, cols)
    if not np.all(np.isfinite(x.real)) or not np.all(np.isfinite(x.imag)):
        raise NonFinite("matrix file contains non-finite entries")
    return x


def save_matrix(path, x: np.ndarray) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(matrix_to_obj(x), fh)
        fh.write("\n")


def load_matrix(path) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        return matrix_from_obj(json.load(fh))


def block_to_obj(a: np.ndarray, x: np.ndarray, b: np.ndarray) -> dict:
    return {"A": matrix_to_obj(a), "X": matrix_to_obj(x), "B": matrix_to_obj(b)}


def block_from_obj(obj: dict) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    try:
        return (matrix_from_obj(obj["A"]), matrix_from_obj(obj["X"]), matrix_from_obj(obj["B"]))
    except KeyError as exc:
        raise UsageError(f"block file missing key {exc}") from exc


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def digest(*matrices: np.ndarray) -> str:
    """sha256 hex digest of the canonical serialization of the inputs."""
    h = hashlib.sha256()
    for m in matrices:
        h.update(canonical_json(matrix_to_obj(np.atleast_2d(np.asarray(m, dtype=complex)))).encode())
    return h.hexdigest()


def complex_to_pair(z: complex) -> list[float]:
    z = complex(z)
    return [float(z.real), float(z.imag)]
