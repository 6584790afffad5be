"""Margin-reporting verifiers, one per statement, plus the batch driver.

Soundness discipline: the right-hand side of a sound report only ever uses
certified upper bounds for delta_2(X) -- the width omega, a disc radius r,
dist(X, CI), or the indiameter -- never the heuristic lower-bound estimate.
Reports whose rhs relies on the estimate carry sound=False and are
informational: they are never counted as violations.
"""

from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .corelinalg import (as_square, check_hermitian, eigvalsh_desc, func_apply,
                         matrix_abs, normality_defect, operator_norm,
                         schatten_norm)
from .blockpos import BlockPositive, FunctionPair, from_schur, witness_modulus
from .ellwidth import delta2_estimate, inradius_certificate
from .errors import (HypothesisFailed, NotNormal, SingularX,
                     SpectrumOutsideDisc, UsageError)
from .matrixio import digest
from .numrange import (dist_to_scalars, dist_zero_of, indiameter_of,
                       range_summary, smallest_enclosing_disc, width_of)
from .rng import (complex_gaussian, derive_trial_seed, haar_unitary, make_rng,
                  random_hermitian, random_pd, random_psd, seed_for_label)

BATCH_P_GRID = (1.0, 1.5, 2.0, 4.0, math.inf)
ALL_STATEMENTS = ("THM11", "REV_BL2", "THM21", "COR22", "COR23", "COR24",
                  "COR35", "COR36", "COR37", "PROP34", "PROP39")


@dataclass(frozen=True)
class MarginReport:
    statement: str
    lhs: float
    rhs: float
    slack: float
    sound: bool
    inputs_digest: str
    seed: int
    norm_p: float | None = None
    j: int | None = None
    n: int | None = None
    trial: int | None = None

    def as_row(self) -> dict:
        p = self.norm_p
        return {
            "statement": self.statement,
            "n": self.n,
            "trial": self.trial,
            "j": self.j,
            "p": ("inf" if p is not None and math.isinf(p) else p),
            "lhs": self.lhs,
            "rhs": self.rhs,
            "slack": self.slack,
            "sound": self.sound,
            "inputs_digest": self.inputs_digest,
            "seed": self.seed,
        }


def _report(statement, lhs, rhs, sound, dig, seed, **kw) -> MarginReport:
    return MarginReport(statement=statement, lhs=float(lhs), rhs=float(rhs),
                        slack=float(rhs) - float(lhs), sound=sound,
                        inputs_digest=dig, seed=seed, **kw)


def is_violation(rep: MarginReport, tol: Tolerances = DEFAULT_TOL) -> bool:
    return rep.sound and rep.slack < -tol.inequality * (1.0 + abs(rep.rhs))


def is_tight(rep: MarginReport, tol: Tolerances = DEFAULT_TOL) -> bool:
    return abs(rep.slack) < tol.tight * (1.0 + abs(rep.rhs))


# ---------------------------------------------------------------- verifiers

def verify_thm11(bp: BlockPositive, p, grid_size: int = 720, seed: int = 0,
                 **ctx) -> MarginReport:
    """||block||_p <= ||A + B + omega I||_p with omega the width of W(X)."""
    omega = width_of(bp.x_block, grid_size)
    lhs = schatten_norm(bp.assembled(), p)
    rhs = schatten_norm(bp.a_block + bp.b_block + omega * np.eye(bp.n), p)
    dig = digest(bp.a_block, bp.x_block, bp.b_block)
    return _report("THM11", lhs, rhs, True, dig, seed, norm_p=float(p), **ctx)


def _abs_eig_pnorm(values: np.ndarray, p) -> float:
    v = np.abs(values)
    if math.isinf(p):
        return float(np.max(v, initial=0.0))
    return float(np.sum(v ** p) ** (1.0 / p))


def verify_reverse(bp: BlockPositive, p, grid_size: int = 720, seed: int = 0,
                   **ctx) -> MarginReport:
    """||diag((A+B)/2 + dI, (A+B)/2 - dI)||_p <= ||block||_p with
    d = dist(0, W(X))."""
    d = dist_zero_of(bp.x_block, grid_size)
    half = eigvalsh_desc(0.5 * (bp.a_block + bp.b_block))
    lhs = _abs_eig_pnorm(np.concatenate([half + d, half - d]), float(p))
    rhs = schatten_norm(bp.assembled(), p)
    dig = digest(bp.a_block, bp.x_block, bp.b_block)
    return _report("REV_BL2", lhs, rhs, True, dig, seed, norm_p=float(p), **ctx)


def delta2_upper_bound(x, grid_size: int = 720) -> float:
    """Certified upper bound for delta_2: min(dist(X, CI), indiameter of W(X)).
    Both components err upward (the reported dist is the objective at a
    concrete point; the grid LP relaxes the inradius problem), so the bound
    stays sound without refinement."""
    x = as_square(x)
    if x.shape[0] < 2:
        return 0.0
    return min(dist_to_scalars(x).dist, indiameter_of(x, grid_size, refine=False))


def verify_thm21(bp: BlockPositive, grid_size: int = 720, seed: int = 0,
                 informational_restarts: int = 8, search_iters: int = 3000,
                 **ctx) -> list[MarginReport]:
    """lambda_{1+2j}(block) <= lambda_{1+j}(A+B) + delta_2(X) for all j, with
    the sound rhs using a certified upper bound for delta_2, an informational
    rhs using the lower-bound estimate, and the refined j = n-1 form
    lambda_{2n-1}(block) <= lambda_n(A+B)."""
    n = bp.n
    ub = delta2_upper_bound(bp.x_block, grid_size)
    est = None
    if n >= 2 and informational_restarts > 0:
        est = delta2_estimate(bp.x_block, restarts=informational_restarts,
                              seed=seed, search_iters=search_iters).value
    block_eigs = eigvalsh_desc(bp.assembled())
    sum_eigs = eigvalsh_desc(bp.a_block + bp.b_block)
    dig = digest(bp.a_block, bp.x_block, bp.b_block)
    reports = []
    for j in range(n):
        lhs = block_eigs[2 * j]
        reports.append(_report("THM21", lhs, sum_eigs[j] + ub, True, dig, seed, j=j, **ctx))
        if est is not None:
            reports.append(_report("THM21", lhs, sum_eigs[j] + est, False, dig, seed, j=j, **ctx))
    reports.append(_report("THM21_REFINED", block_eigs[2 * n - 2], sum_eigs[n - 1],
                           True, dig, seed, j=n - 1, **ctx))
    return reports


def verify_cor22(bp: BlockPositive, seed: int = 0, **ctx) -> list[MarginReport]:
    """lambda_{1+2j}(block) <= lambda_{1+j}(A+B) + dist(X, CI)."""
    dist = dist_to_scalars(bp.x_block).dist
    block_eigs = eigvalsh_desc(bp.assembled())
    sum_eigs = eigvalsh_desc(bp.a_block + bp.b_block)
    dig = digest(bp.a_block, bp.x_block, bp.b_block)
    return [_report("COR22", block_eigs[2 * j], sum_eigs[j] + dist, True, dig, seed, j=j, **ctx)
            for j in range(bp.n)]


def verify_cor23(a, b, grid_size: int = 720, seed: int = 0, **ctx) -> list[MarginReport]:
    """lambda_{1+2j}(A*A + B*B) <= lambda_{1+j}(AA* + BB*) + delta_2(AB*)
    for 1 + 2j <= n, with a certified upper bound for delta_2."""
    a = as_square(a)
    b = as_square(b)
    n = a.shape[0]
    ub = delta2_upper_bound(a @ b.conj().T, grid_size)
    lhs_eigs = eigvalsh_desc(a.conj().T @ a + b.conj().T @ b)
    rhs_eigs = eigvalsh_desc(a @ a.conj().T + b @ b.conj().T)
    dig = digest(a, b)
    return [_report("COR23", lhs_eigs[2 * j], rhs_eigs[j] + ub, True, dig, seed, j=j, **ctx)
            for j in range((n + 1) // 2)]


def verify_cor24(bp: BlockPositive, r: float | None = None,
                 center: complex | None = None, seed: int = 0,
                 tol: Tolerances = DEFAULT_TOL, **ctx) -> list[MarginReport]:
    """Normal off-diagonal N with spectrum in a disc of radius r:
    lambda_{1+2j}(block) <= lambda_{1+j}(A+B) + r. Fits the smallest
    enclosing disc of the spectrum when (r, center) are not given."""
    x = bp.x_block
    if normality_defect(x) > 1e-9:
        raise NotNormal(f"off-diagonal block has normality defect {normality_defect(x):.3e}")
    eigs = np.linalg.eigvals(x)
    if r is None or center is None:
        center, r = smallest_enclosing_disc(eigs)
    else:
        center, r = complex(center), float(r)
        if np.max(np.abs(eigs - center), initial=0.0) > r + 1e-9:
            raise SpectrumOutsideDisc(
                f"spectrum escapes disc({center}, {r}) by "
                f"{np.max(np.abs(eigs - center)) - r:.3e}")
    block_eigs = eigvalsh_desc(bp.assembled())
    sum_eigs = eigvalsh_desc(bp.a_block + bp.b_block)
    dig = digest(bp.a_block, bp.x_block, bp.b_block)
    return [_report("COR24", block_eigs[2 * j], sum_eigs[j] + r, True, dig, seed, j=j, **ctx)
            for j in range(bp.n)]


def verify_cor35(h, k, x, seed: int = 0, tol: Tolerances = DEFAULT_TOL,
                 **ctx) -> MarginReport:
    """For Hermitian H, K and invertible Hermitian X with HK a scalar
    perturbation of a contraction:
    ||X H^2 X + X^-1 K^2 X^-1|| <= ||H X^2 H + K X^-2 K|| + 1."""
    h = check_hermitian(h, tol)
    k = check_hermitian(k, tol)
    x = check_hermitian(x, tol)
    vals, vecs = np.linalg.eigh(x)
    if float(np.min(np.abs(vals))) <= 1e-8:
        raise SingularX(f"X has near-zero eigenvalue {np.min(np.abs(vals)):.3e}")
    if dist_to_scalars(h @ k).dist > 1.0 + 1e-9:
        raise HypothesisFailed(
            f"dist(HK, CI) = {dist_to_scalars(h @ k).dist:.6f} exceeds 1")
    x_inv = (vecs / vals) @ vecs.conj().T
    lhs = operator_norm(x @ h @ h @ x + x_inv @ k @ k @ x_inv)
    rhs = operator_norm(h @ x @ x @ h + k @ x_inv @ x_inv @ k) + 1.0
    return _report("COR35", lhs, rhs, True, digest(h, k, x), seed,
                   norm_p=math.inf, **ctx)


def verify_cor36(x, pair: FunctionPair, restarts: int = 16, seed: int = 0,
                 tol: Tolerances = DEFAULT_TOL, search_iters: int = 3000,
                 **ctx) -> MarginReport:
    """Certificate ||f(|X|)+g(|X|)|| - ||f(|X*|)+g(|X|)|| against the delta_2
    estimate; a shortfall flags the optimizer (sound=False), not the theorem."""
    x = as_square(x)
    right = matrix_abs(x, "right")
    left = matrix_abs(x, "left")
    f_r = func_apply(pair.f, right, tol)
    g_r = func_apply(pair.g, right, tol)
    f_l = func_apply(pair.f, left, tol)
    lhs = operator_norm(f_r + g_r) - operator_norm(f_l + g_r)
    rhs = delta2_estimate(x, restarts=restarts, seed=seed,
                          search_iters=search_iters).value
    sound = (rhs - lhs) >= -tol.inequality * (1.0 + abs(rhs))
    return _report("COR36", lhs, rhs, sound, digest(x), seed, **ctx)


def verify_cor37(x, a: complex | None = None, grid_size: int = 720,
                 seed: int = 0, tol: Tolerances = DEFAULT_TOL, **ctx) -> MarginReport:
    """Certificate ||X-aI|| - ||(|X-aI|+|X*-conj(a)I|)/2|| against the
    inradius of W(X); defaults a to the normalized trace."""
    x = as_square(x)
    if a is None:
        a = complex(np.trace(x)) / x.shape[0]
    lhs = inradius_certificate(x, a)
    rhs = range_summary(x, grid_size).inradius
    sound = (rhs - lhs) >= -tol.inequality * (1.0 + abs(rhs))
    return _report("COR37", lhs, rhs, sound, digest(x), seed, **ctx)


def verify_prop39(x, restarts: int = 16, seed: int = 0,
                  tol: Tolerances = DEFAULT_TOL, search_iters: int = 3000,
                  **ctx) -> MarginReport:
    """Certificate 2||X|| - |||X|+|X*||| against the delta_2 estimate."""
    x = as_square(x)
    lhs = 2.0 * operator_norm(x) - operator_norm(matrix_abs(x, "right") + matrix_abs(x, "left"))
    rhs = delta2_estimate(x, restarts=restarts, seed=seed,
                          search_iters=search_iters).value
    sound = (rhs - lhs) >= -tol.inequality * (1.0 + abs(rhs))
    return _report("PROP39", lhs, rhs, sound, digest(x), seed, **ctx)


def prop34_forward_slacks(x, n_completions: int = 50, seed: int = 0,
                          tol: Tolerances = DEFAULT_TOL):
    """For normal X: per random completion, the Frobenius slack
    ||A+B||_2 - ||block||_2 and the trace slack Tr(AB) - Tr(X*X)."""
    x = as_square(x)
    if normality_defect(x) > 1e-9:
        raise NotNormal("prop34 forward direction requires a normal matrix")
    n = x.shape[0]
    norm_slacks, trace_slacks, completions = [], [], []
    for t in range(n_completions):
        rng = make_rng(derive_trial_seed(seed, t))
        a = random_pd(rng, n, floor=0.2 + rng.uniform(0.0, 0.5))
        s = random_psd(rng, n) if rng.uniform() < 0.5 else None
        bp = from_schur(a, x, s, tol)
        lhs = schatten_norm(bp.assembled(), 2)
        rhs = schatten_norm(bp.a_block + bp.b_block, 2)
        norm_slacks.append(rhs - lhs)
        tr_ab = float(np.trace(bp.a_block @ bp.b_block).real)
        tr_xx = float(np.trace(x.conj().T @ x).real)
        trace_slacks.append(tr_ab - tr_xx)
        completions.append(bp)
    return np.array(norm_slacks), np.array(trace_slacks), completions


def prop34_witness_margin(x, tol: Tolerances = DEFAULT_TOL):
    """For nonnormal X: margin ||witness block||_2 - |||X*|+|X|||_2 > 0."""
    bp = witness_modulus(x, tol)
    rhs = schatten_norm(bp.assembled(), 2)
    lhs = schatten_norm(bp.a_block + bp.b_block, 2)
    return rhs - lhs, bp


def verify_prop34(x, n_completions: int = 50, seed: int = 0,
                  tol: Tolerances = DEFAULT_TOL, **ctx):
    """(forward, witness) reports. Normal X: the worst random completion's
    Frobenius check (equivalent, after squaring, to the trace inequality
    Tr X*X <= Tr AB, which prop34_forward_slacks also evaluates directly).
    Nonnormal X: the strict modulus-witness violation, slack = the strict
    margin ||witness block||_2 - |||X*|+|X|||_2, expected > 0."""
    x = as_square(x)
    dig = digest(x)
    if normality_defect(x) <= 1e-9:
        norm_s, _, completions = prop34_forward_slacks(x, n_completions, seed, tol)
        worst = completions[int(np.argmin(norm_s))]
        lhs = schatten_norm(worst.assembled(), 2)
        rhs = schatten_norm(worst.a_block + worst.b_block, 2)
        return _report("PROP34_FWD", lhs, rhs, True, dig, seed, norm_p=2.0, **ctx), None
    margin, bp = prop34_witness_margin(x, tol)
    lhs = schatten_norm(bp.a_block + bp.b_block, 2)
    wit = _report("PROP34_WIT", lhs, lhs + margin, True, dig, seed, norm_p=2.0, **ctx)
    return None, wit


# ------------------------------------------------------------- batch driver

def _gen_bp_general(n: int, rng) -> BlockPositive:
    if rng.uniform() < 0.5:
        g = complex_gaussian(rng, 2 * n, 2 * n)
        w = (g @ g.conj().T) / (2 * n)
        return BlockPositive(w[:n, :n], w[n:, n:], w[:n, n:])
    a = random_pd(rng, n, floor=0.2)
    x = complex_gaussian(rng, n, n)
    s = random_psd(rng, n) if rng.uniform() < 0.5 else None
    return from_schur(a, x, s)


def _gen_normal_bp(n: int, rng):
    v = haar_unitary(rng, n)
    center = complex(*rng.standard_normal(2))
    r = abs(rng.standard_normal()) + 0.1
    eigs = center + r * rng.uniform(0.0, 1.0, n) * np.exp(1j * rng.uniform(0.0, 2 * np.pi, n))
    x = (v * eigs) @ v.conj().T
    a = random_pd(rng, n, floor=0.2)
    s = random_psd(rng, n) if rng.uniform() < 0.5 else None
    return from_schur(a, x, s)


def _gen_cor35(n: int, rng):
    h = random_hermitian(rng, n)
    k = random_hermitian(rng, n)
    d0 = dist_to_scalars(h @ k).dist
    if d0 > 0:
        k = k * (rng.uniform(0.1, 1.0) / d0)
    vals, vecs = np.linalg.eigh(random_hermitian(rng, n))
    vals = np.sign(vals) * np.maximum(np.abs(vals), 0.2)
    x = (vecs * vals) @ vecs.conj().T
    return h, k, x


_BATCH_SEARCH_ITERS = 800  # light budget: informational estimates only


def _statement_reports(stmt: str, n: int, trial: int, trial_seed: int,
                       p_grid, grid_size: int, tol: Tolerances,
                       delta2_restarts: int) -> list[MarginReport]:
    rng = make_rng(trial_seed)
    ctx = {"n": n, "trial": trial}
    if stmt == "THM11":
        bp = _gen_bp_general(n, rng)
        return [verify_thm11(bp, p, grid_size, trial_seed, **ctx) for p in p_grid]
    if stmt == "REV_BL2":
        bp = _gen_bp_general(n, rng)
        return [verify_reverse(bp, p, grid_size, trial_seed, **ctx) for p in p_grid]
    if stmt == "THM21":
        bp = _gen_bp_general(n, rng)
        return verify_thm21(bp, grid_size, trial_seed,
                            informational_restarts=max(2, delta2_restarts // 4),
                            search_iters=_BATCH_SEARCH_ITERS, **ctx)
    if stmt == "COR22":
        bp = _gen_bp_general(n, rng)
        return verify_cor22(bp, trial_seed, **ctx)
    if stmt == "COR23":
        a = complex_gaussian(rng, n, n)
        b = complex_gaussian(rng, n, n)
        return verify_cor23(a, b, grid_size, trial_seed, **ctx)
    if stmt == "COR24":
        bp = _gen_normal_bp(n, rng)
        return verify_cor24(bp, seed=trial_seed, tol=tol, **ctx)
    if stmt == "COR35":
        h, k, x = _gen_cor35(n, rng)
        return [verify_cor35(h, k, x, trial_seed, tol, **ctx)]
    if stmt == "COR36":
        x = complex_gaussian(rng, n, n)
        alpha = float(rng.choice(np.arange(1, 10)) / 10.0)
        return [verify_cor36(x, FunctionPair(alpha), delta2_restarts, trial_seed,
                             tol, search_iters=_BATCH_SEARCH_ITERS, **ctx)]
    if stmt == "COR37":
        x = complex_gaussian(rng, n, n)
        return [verify_cor37(x, None, grid_size, trial_seed, tol, **ctx)]
    if stmt == "PROP34":
        v = haar_unitary(rng, n)
        eigs = complex_gaussian(rng, n)
        x_norm = (v * eigs) @ v.conj().T
        x_gen = complex_gaussian(rng, n, n)
        fwd, _ = verify_prop34(x_norm, n_completions=10, seed=trial_seed, tol=tol, **ctx)
        _, wit = verify_prop34(x_gen, seed=trial_seed, tol=tol, **ctx)
        return [r for r in (fwd, wit) if r is not None]
    if stmt == "PROP39":
        x = complex_gaussian(rng, n, n)
        return [verify_prop39(x, delta2_restarts, trial_seed, tol,
                              search_iters=_BATCH_SEARCH_ITERS, **ctx)]
    raise UsageError(f"unknown statement id {stmt!r}")


@dataclass
class BatchResult:
    reports: list[MarginReport]
    summary: list[dict]
    violations: int
    tight: list[MarginReport] = field(default_factory=list)
    worst: dict = field(default_factory=dict)

    def to_obj(self, provenance: dict | None = None) -> dict:
        return {
            "schema": "marginreport/1",
            "provenance": provenance or {},
            "violations": self.violations,
            "reports_total": len(self.reports),
            "summary": self.summary,
            "worst": {k: v.as_row() for k, v in self.worst.items()},
            "tight": [r.as_row() for r in self.tight],
            "reports": [r.as_row() for r in self.reports],
        }

    def write_csv(self, path) -> None:
        cols = ["statement", "n", "trial", "j", "p", "lhs", "rhs", "slack",
                "sound", "inputs_digest", "seed"]
        with open(path, "w", newline="", encoding="utf-8") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            for r in self.reports:
                w.writerow(r.as_row())


def batch_verify(statement_ids: Sequence[str], n_list: Sequence[int], trials: int,
                 seed: int, p_grid: Iterable[float] = BATCH_P_GRID,
                 grid_size: int = 720, tol: Tolerances = DEFAULT_TOL,
                 delta2_restarts: int = 16, max_workers: int = 1) -> BatchResult:
    """Run every statement over random instances; deterministic given seed and
    independent of max_workers (per-trial Philox streams, index-ordered merge)."""
    p_grid = tuple(p_grid)
    statements = []
    for s in statement_ids:
        s = s.upper()
        statements.append(s)
    tasks = []
    for stmt in statements:
        for n in n_list:
            stmt_master = seed_for_label(seed, f"{stmt}/n={n}")
            for trial in range(trials):
                tasks.append((stmt, n, trial, derive_trial_seed(stmt_master, trial)))

    def run(task):
        stmt, n, trial, trial_seed = task
        return _statement_reports(stmt, n, trial, trial_seed, p_grid, grid_size,
                                  tol, delta2_restarts)

    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            chunks = list(pool.map(run, tasks))
    else:
        chunks = [run(t) for t in tasks]

    reports = [r for chunk in chunks for r in chunk]
    violations = sum(1 for r in reports if is_violation(r, tol))
    tight = [r for r in reports if r.sound and is_tight(r, tol)]
    summary = []
    worst = {}
    for stmt in statements:
        mine = [r for r in reports if r.statement.startswith(stmt) and r.sound]
        if not mine:
            continue
        w = min(mine, key=lambda r: r.slack)
        worst[stmt] = w
        summary.append({
            "statement": stmt,
            "reports": len(mine),
            "violations": sum(1 for r in mine if is_violation(r, tol)),
            "min_slack": w.slack,
            "tight": sum(1 for r in mine if is_tight(r, tol)),
        })
    return BatchResult(reports=reports, summary=summary, violations=violations,
                       tight=tight, worst=worst)
