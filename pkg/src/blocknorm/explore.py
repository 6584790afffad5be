"""Reproducible extremal searches for the open problems: sharpness of the
disc radius r (normal off-diagonal), the essential-Hermitian conjecture for
the operator-norm inequality, and the Schatten-p scan for normal blocks.

Searches maximize nonsmooth spectral objectives with a derivative-free
hill-climb / simulated-annealing hybrid over unconstrained parametrizations
(Cholesky-style factors for positive blocks, clamped unit-disc coordinates
for normal spectra). Restart t draws from its own Philox stream keyed by
derive_trial_seed(seed, t), so completion order cannot change results.
Evidence only: best values are recorded, never asserted as answers.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field

import numpy as np

from .blockpos import BlockPositive
from .config import DEFAULT_TOL, Tolerances
from .corelinalg import as_square, schatten_norm
from .errors import BadJ, BlocknormError, DimensionMismatch
from .matrixio import block_from_obj, block_to_obj
from .rng import (complex_gaussian, derive_trial_seed, haar_unitary, make_rng,
                  random_pd, random_psd, seed_for_label)

__all__ = [
    "SearchBudget", "SearchResult", "search_q26", "search_conj33", "scan_q38",
    "derive_trial_seed", "q26_objective", "conj33_objective", "q38_ratio",
    "reverify_witness",
]


@dataclass(frozen=True)
class SearchBudget:
    restarts: int = 64
    iters_per_restart: int = 500
    seed: int = 0
    n: int = 3
    time_limit_s: float | None = None


@dataclass
class SearchResult:
    objective_name: str
    best_value: float
    witness: dict
    history: list = field(default_factory=list)
    budget: SearchBudget | None = None

    def to_obj(self, provenance: dict | None = None) -> dict:
        b = self.budget
        return {
            "schema": "searchresult/1",
            "provenance": provenance or {},
            "objective_name": self.objective_name,
            "best_value": self.best_value,
            "witness": self.witness,
            "history": [[int(i), float(v)] for i, v in self.history],
            "budget": {
                "restarts": b.restarts, "iters_per_restart": b.iters_per_restart,
                "seed": b.seed, "n": b.n, "time_limit_s": b.time_limit_s,
            } if b else None,
        }


class _Checkpointer:
    """Writes the best-so-far witness to disk every >= 10 s and on demand."""

    def __init__(self, path, interval_s: float = 10.0):
        self.path = path
        self.interval = interval_s
        self.last = time.monotonic()

    def maybe(self, result: SearchResult) -> None:
        if self.path is None:
            return
        now = time.monotonic()
        if now - self.last >= self.interval:
            self.flush(result)

    def flush(self, result: SearchResult) -> None:
        if self.path is None:
            return
        with open(self.path, "w", encoding="utf-8") as fh:
            json.dump(result.to_obj(), fh)
        self.last = time.monotonic()


def _lambda_desc(h: np.ndarray) -> np.ndarray:
    return np.linalg.eigvalsh(0.5 * (h + h.conj().T))[::-1]


def _vec_to_complex_matrix(v: np.ndarray, n: int) -> np.ndarray:
    return v[: n * n].reshape(n, n) + 1j * v[n * n:].reshape(n, n)


def _clamp_disc(z: np.ndarray) -> np.ndarray:
    mag = np.abs(z)
    return np.where(mag > 1.0, z / np.where(mag == 0, 1.0, mag), z)


# ----------------------------------------------------------------- Q26

def _q26_build(params: np.ndarray, n: int, r: float):
    c = complex(params[0], params[1])
    z = _clamp_disc(params[2:2 + n] + 1j * params[2 + n:2 + 2 * n])
    base = 2 + 2 * n
    l = _vec_to_complex_matrix(params[base: base + 2 * n * n], n)
    m = _vec_to_complex_matrix(params[base + 2 * n * n:], n)
    # conjugating by U (+) U makes the normal block diagonal WLOG
    x = np.diag(c + r * z)
    a = l @ l.conj().T + 1e-6 * np.eye(n)
    b = x.conj().T @ np.linalg.solve(a, x) + m @ m.conj().T
    return a, x, 0.5 * (b + b.conj().T)


def _q26_gap(a, x, b, j: int) -> float:
    block = np.block([[a, x], [x.conj().T, b]])
    return float(_lambda_desc(block)[2 * j] - _lambda_desc(a + b)[j])


def q26_objective(a, x, b, j: int) -> float:
    """Recompute the q26 gap from explicit blocks (re-verification closure)."""
    return _q26_gap(as_square(a), as_square(x), as_square(b), j)


def _anneal_maximize(objective, dim: int, restarts: int, iters: int, seed: int,
                     scale0: float = 1.0, best_init: float = -math.inf,
                     it_offset: int = 0, time_limit_s: float | None = None,
                     on_improve=None):
    """Shared SA/hill-climb driver. Proposals are Gaussian steps; moves that
    improve are always taken, downhill moves occasionally (decaying
    temperature); sigma shrinks on a fixed schedule. Returns
    (best_value, best_params, history, global_iter); history holds global
    best-so-far improvements relative to best_init."""
    best_val = best_init
    best_params = None
    history = []
    global_it = it_offset
    t_start = time.monotonic()
    for t in range(restarts):
        rng = make_rng(derive_trial_seed(seed, t))
        cur = scale0 * rng.standard_normal(dim)
        cur_val = objective(cur)
        sigma = 0.5 * scale0
        temp = 0.1 * (1.0 + abs(cur_val) if math.isfinite(cur_val) else 1.0)
        for it in range(iters):
            global_it += 1
            prop = cur + sigma * rng.standard_normal(dim)
            val = objective(prop)
            accept = val > cur_val
            if not accept and math.isfinite(val):
                accept = rng.uniform() < math.exp(min(0.0, (val - cur_val) / max(temp, 1e-12)))
            if accept:
                cur, cur_val = prop, val
            if cur_val > best_val:
                best_val, best_params = cur_val, cur.copy()
                history.append((global_it, best_val))
                if on_improve is not None:
                    on_improve(best_val, best_params, history)
            if (it + 1) % 50 == 0:
                sigma *= 0.8
                temp *= 0.7
        if time_limit_s is not None and time.monotonic() - t_start > time_limit_s:
            break
    return best_val, best_params, history, global_it


def search_q26(r: float, n: int, j: int, budget: SearchBudget,
               checkpoint_path=None) -> SearchResult:
    """Maximize lambda_{1+2j}(block) - lambda_{1+j}(A+B) over normal N with
    spectrum in a disc of radius r and PSD completions (Schur parametrization).
    The best value can never exceed r (plus roundoff): that cap is enforced."""
    if not 0 <= j <= n - 1:
        raise BadJ(f"need 0 <= j <= n-1, got j={j}, n={n}")
    if r < 0:
        raise DimensionMismatch(f"radius must be nonnegative, got {r}")
    dim = 2 + 2 * n + 4 * n * n

    def objective(params):
        a, x, b = _q26_build(params, n, r)
        return _q26_gap(a, x, b, j)

    def make_result(val, params, history):
        a, x, b = _q26_build(params, n, r)
        from .numrange import smallest_enclosing_disc
        center, sed_r = smallest_enclosing_disc(np.diagonal(x))
        witness = {
            "block": block_to_obj(a, x, b),
            "j": j, "r": r,
            "spectrum_disc": {"center": [center.real, center.imag], "radius": sed_r},
            "objective": val,
        }
        return SearchResult("q26_gap", val, witness, list(history), budget)

    cp = _Checkpointer(checkpoint_path) if checkpoint_path else None
    on_improve = (lambda v, p, h: cp.maybe(make_result(v, p, h))) if cp else None
    best_val, best_params, history, _ = _anneal_maximize(
        objective, dim, budget.restarts, budget.iters_per_restart, budget.seed,
        time_limit_s=budget.time_limit_s, on_improve=on_improve)
    if best_params is None:
        best_params = np.zeros(dim)
        best_val = objective(best_params)
        history = [(0, best_val)]
    if best_val > r + 1e-8:
        raise BlocknormError(
            f"q26 gap {best_val} exceeds the certified cap r={r}: verifier chain bug")
    result = make_result(best_val, best_params, history)
    result.witness["sharpness_ratio"] = best_val / r if r > 0 else None
    if cp is not None:
        cp.flush(result)
    return result


# ----------------------------------------------------------------- Conj 3.3

def conj33_objective(a, x, b) -> float:
    """ratio ||[[A,X],[X*,B]]|| / ||A+B|| (operator norms)."""
    a, x, b = as_square(a), as_square(x), as_square(b)
    block = np.block([[a, x], [x.conj().T, b]])
    return float(_lambda_desc(block)[0] / _lambda_desc(a + b)[0])


def search_conj33(x, budget: SearchBudget, checkpoint_path=None) -> SearchResult:
    """Maximize ||block|| / ||A+B|| over PSD completions of the given X.

    Primary pass: minimal Schur completions B = X* A^{-1} X over A = LL* + eI.
    Secondary pass (the GLRT-style family): completions with A + B = kI,
    k >= 2||X||, with PSD-infeasible proposals rejected. A best value > 1 is
    evidence that X fails the inequality for some completion."""
    x = as_square(x)
    n = x.shape[0]
    if n == 0:
        raise DimensionMismatch("search_conj33 needs a nonempty matrix")
    xnorm = float(np.linalg.svd(x, compute_uv=False)[0])
    eye = np.eye(n)

    def obj_schur(params):
        l = _vec_to_complex_matrix(params, n)
        a = l @ l.conj().T + 1e-8 * eye
        b = x.conj().T @ np.linalg.solve(a, x)
        block = np.block([[a, x], [x.conj().T, b]])
        return float(_lambda_desc(block)[0] / _lambda_desc(a + b)[0])

    def obj_ki(params):
        # A = k*t*normalized PSD, B = kI - A; reject non-PSD blocks
        l = _vec_to_complex_matrix(params[:-2], n)
        k = 2.0 * xnorm * (1.0 + math.log1p(math.exp(params[-2])))
        t = 1.0 / (1.0 + math.exp(-params[-1]))
        raw = l @ l.conj().T + 1e-8 * eye
        a = (k * t / float(np.linalg.eigvalsh(raw)[-1])) * raw
        b = k * eye - a
        block = np.block([[a, x], [x.conj().T, b]])
        evals = np.linalg.eigvalsh(block)
        if evals[0] < -1e-10 * (1.0 + evals[-1]):
            return -math.inf
        return float(evals[-1] / k)

    n_primary = max(1, (2 * budget.restarts + 2) // 3)
    n_second = max(0, budget.restarts - n_primary)
    cp = _Checkpointer(checkpoint_path) if checkpoint_path else None

    def build_from(pass_name, params):
        if pass_name == "schur":
            l = _vec_to_complex_matrix(params, n)
            a = l @ l.conj().T + 1e-8 * eye
            b = x.conj().T @ np.linalg.solve(a, x)
        else:
            l = _vec_to_complex_matrix(params[:-2], n)
            k = 2.0 * xnorm * (1.0 + math.log1p(math.exp(params[-2])))
            t = 1.0 / (1.0 + math.exp(-params[-1]))
            raw = l @ l.conj().T + 1e-8 * eye
            a = (k * t / float(np.linalg.eigvalsh(raw)[-1])) * raw
            b = k * eye - a
        return a, 0.5 * (b + b.conj().T)

    def make_result(val, tagged, history):
        pass_name, params = tagged
        a, b = build_from(pass_name, params)
        witness = {"block": block_to_obj(a, x, b), "pass": pass_name, "objective": val}
        return SearchResult("conj33_ratio", val, witness, list(history), budget)

    best_val = -math.inf
    best_tagged = None
    history: list = []
    offset = 0
    for pass_name, obj, dim, restarts in (
        ("schur", obj_schur, 2 * n * n, n_primary),
        ("sum_kI", obj_ki, 2 * n * n + 2, n_second),
    ):
        if restarts == 0 or (pass_name == "sum_kI" and xnorm == 0.0):
            continue

        def on_improve(v, p, h, _pass=pass_name):
            if cp is not None:
                cp.maybe(make_result(v, (_pass, p), history + h))

        val, params, hist, offset = _anneal_maximize(
            obj, dim, restarts, budget.iters_per_restart,
            seed_for_label(budget.seed, pass_name), best_init=best_val,
            it_offset=offset, time_limit_s=budget.time_limit_s,
            on_improve=on_improve)
        history.extend(hist)
        if params is not None and val > best_val:
            best_val, best_tagged = val, (pass_name, params)
    if best_tagged is None:
        # fall back to the identity-scaled completion so a witness always exists
        params = np.zeros(2 * n * n)
        best_val = obj_schur(params)
        best_tagged = ("schur", params)
        history = [(0, best_val)]
    result = make_result(best_val, best_tagged, history)
    if cp is not None:
        cp.flush(result)
    return result


# ----------------------------------------------------------------- Q38 scan

def q38_ratio(bp: BlockPositive, p) -> float:
    """||block||_p / ||A+B||_p for one instance."""
    denom = schatten_norm(bp.a_block + bp.b_block, p)
    return float(schatten_norm(bp.assembled(), p) / denom)


def scan_q38(p_grid, n: int, trials: int, seed: int,
             tol: Tolerances = DEFAULT_TOL) -> dict:
    """Max observed ||block||_p / ||A+B||_p over random normal-off-diagonal
    instances, per p. Witnesses (trial seeds + the argmax blocks) are kept for
    every ratio exceeding 1, so any >1 entry is reproducible."""
    p_grid = [float(p) for p in p_grid]
    if not p_grid:
        raise DimensionMismatch("p_grid must be nonempty")
    from .blockpos import from_schur
    rows = {p: {"p": ("inf" if math.isinf(p) else p), "max_ratio": -math.inf,
                "argmax_trial": None, "exceed_count": 0, "exceeding": []}
            for p in p_grid}
    argmax_bp = {p: None for p in p_grid}
    for t in range(trials):
        rng = make_rng(derive_trial_seed(seed, t))
        v = haar_unitary(rng, n)
        eigs = complex_gaussian(rng, n)
        x = (v * eigs) @ v.conj().T
        a = random_pd(rng, n, floor=0.2)
        s = random_psd(rng, n) if rng.uniform() < 0.5 else None
        bp = from_schur(a, x, s, tol)
        for p in p_grid:
            ratio = q38_ratio(bp, p)
            row = rows[p]
            if ratio > row["max_ratio"]:
                row["max_ratio"] = ratio
                row["argmax_trial"] = t
                argmax_bp[p] = bp
            if ratio > 1.0:
                row["exceed_count"] += 1
                row["exceeding"].append({"trial": t, "ratio": ratio,
                                         "trial_seed": derive_trial_seed(seed, t)})
    for p in p_grid:
        bp = argmax_bp[p]
        rows[p]["witness"] = block_to_obj(bp.a_block, bp.x_block, bp.b_block) if bp else None
    return {"schema": "q38table/1", "n": n, "trials": trials, "seed": seed,
            "table": [rows[p] for p in p_grid]}


def reverify_witness(result_obj: dict) -> float:
    """Recompute a search objective from its stored witness matrices alone."""
    name = result_obj["objective_name"]
    w = result_obj["witness"]
    a, x, b = block_from_obj(w["block"])
    if name == "q26_gap":
        return q26_objective(a, x, b, int(w["j"]))
    if name == "conj33_ratio":
        return conj33_objective(a, x, b)
    raise BlocknormError(f"unknown objective {name!r}")
