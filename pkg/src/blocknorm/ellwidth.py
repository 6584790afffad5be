"""Elliptical width delta_2(X): the largest indiameter of W over all 2-dim
compressions, estimated from below by local search on orthonormal 2-frames,
plus the closed-form lower-bound certificates.

The estimate is a certified LOWER bound: it is the indiameter of an actual
2x2 compression (reported with its attaining frame). Verifiers that need an
upper bound for delta_2 must use dist_to_scalars or the indiameter instead.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .corelinalg import as_square, matrix_abs, operator_norm
from .errors import BadAlpha, BadFrame, DimensionTooSmall
from .rng import derive_trial_seed, make_rng

DEFAULT_RESTARTS = 64
DEFAULT_ALPHA_GRID = tuple(round(0.1 * k, 1) for k in range(1, 10))


@dataclass(frozen=True)
class Frame2:
    """Orthonormal pair (u, v) spanning a 2-dimensional subspace."""

    u: np.ndarray
    v: np.ndarray

    def matrix(self) -> np.ndarray:
        return np.column_stack([self.u, self.v])


@dataclass(frozen=True)
class Delta2Estimate:
    value: float
    best_frame: Frame2
    restarts_used: int
    certificates: dict = field(default_factory=dict)


def _check_frame(frame: Frame2, n: int, tol: Tolerances) -> np.ndarray:
    q = frame.matrix()
    if q.shape != (n, 2):
        raise BadFrame(f"frame vectors must have length {n}")
    g = q.conj().T @ q
    if np.linalg.norm(g - np.eye(2)) > 10 * tol.frame_orthonormal * math.sqrt(n):
        raise BadFrame(f"frame not orthonormal: gram residual {np.linalg.norm(g - np.eye(2)):.2e}")
    return q


def compress2(x, frame: Frame2, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """2x2 compression [[u*Xu, u*Xv], [v*Xu, v*Xv]]."""
    x = as_square(x)
    q = _check_frame(frame, x.shape[0], tol)
    return q.conj().T @ (x @ q)


def minor_axis_sq(c) -> float:
    """Squared indiameter of W(C) for 2x2 C: max(0, tr(C*C) - |mu1|^2 - |mu2|^2)."""
    c = np.asarray(c, dtype=complex)
    return _minor_sq(c[0, 0], c[0, 1], c[1, 0], c[1, 1])


def _minor_sq(c00, c01, c10, c11) -> float:
    tr = c00 + c11
    det = c00 * c11 - c01 * c10
    disc = cmath.sqrt(tr * tr * 0.25 - det)
    mu1 = tr * 0.5 + disc
    mu2 = tr * 0.5 - disc
    gram = abs(c00) ** 2 + abs(c01) ** 2 + abs(c10) ** 2 + abs(c11) ** 2
    val = gram - abs(mu1) ** 2 - abs(mu2) ** 2
    # snap cancellation noise to 0 so normal compressions report exactly 0
    if val < 1e-13 * (1.0 + gram):
        return 0.0
    return val


def _objective(x: np.ndarray, q: np.ndarray) -> float:
    m = x @ q
    c = q.conj().T @ m
    return _minor_sq(c[0, 0], c[0, 1], c[1, 0], c[1, 1])


def _orthonormalize(y: np.ndarray) -> np.ndarray:
    u = y[:, 0]
    u = u / np.linalg.norm(u)
    v = y[:, 1] - u * (u.conj() @ y[:, 1])
    nv = np.linalg.norm(v)
    if nv < 1e-14:
        raise ZeroDivisionError
    return np.column_stack([u, v / nv])


def _batch_objective(x: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Minor-axis-squared of the compressions for a stack of frames (R,n,2)."""
    m = np.einsum("ij,rjk->rik", x, q)
    c = np.einsum("rni,rnj->rij", q.conj(), m)
    tr = c[:, 0, 0] + c[:, 1, 1]
    det = c[:, 0, 0] * c[:, 1, 1] - c[:, 0, 1] * c[:, 1, 0]
    disc = np.sqrt(tr * tr * 0.25 - det + 0j)
    mu1 = tr * 0.5 + disc
    mu2 = tr * 0.5 - disc
    gram = np.sum(np.abs(c) ** 2, axis=(1, 2))
    val = gram - np.abs(mu1) ** 2 - np.abs(mu2) ** 2
    return np.where(val < 1e-13 * (1.0 + gram), 0.0, val)


def _batch_orthonormalize(y: np.ndarray):
    """(frames, valid mask) from a stack of raw pairs (R,n,2)."""
    u = y[:, :, 0]
    un = np.linalg.norm(u, axis=1)
    ok = un > 1e-14
    u = u / np.where(ok, un, 1.0)[:, None]
    proj = np.sum(u.conj() * y[:, :, 1], axis=1)
    v = y[:, :, 1] - u * proj[:, None]
    vn = np.linalg.norm(v, axis=1)
    ok &= vn > 1e-12
    v = v / np.where(vn > 1e-12, vn, 1.0)[:, None]
    return np.stack([u, v], axis=2), ok


_CHUNK = 128


def _search_frames(x: np.ndarray, starts: np.ndarray, seeds: list[int],
                   iters_cap: int = 3000, step0: float = 0.5,
                   shrink_after: int = 20, min_step: float = 1e-9):
    """Lockstep hill-climb on the Grassmannian for a batch of restarts.

    Each restart consumes only its own Philox stream and anneals its own step
    (halved after `shrink_after` non-improving proposals; proposals move along
    random tangent directions since in-span mixing never changes the
    objective), so results are independent of batch composition or order.
    """
    r, n, _ = starts.shape
    q = starts.copy()
    best = _batch_objective(x, q)
    step = np.full(r, step0)
    bad = np.zeros(r, dtype=int)
    gens = [make_rng(s) for s in seeds]
    scale = 1.0 + best
    chunk = np.empty((r, _CHUNK, n, 2), dtype=complex)
    pos = _CHUNK
    it = 0
    active = step > min_step
    while it < iters_cap and np.any(active):
        if pos >= _CHUNK:
            for i in range(r):
                raw = gens[i].standard_normal((_CHUNK, n, 2, 2))
                chunk[i] = raw[..., 0] + 1j * raw[..., 1]
            pos = 0
        g = chunk[:, pos]
        pos += 1
        it += 1
        t = g - np.einsum("rni,rij->rnj", q, np.einsum("rni,rnj->rij", q.conj(), g))
        tn = np.linalg.norm(t, axis=(1, 2))
        tn = np.where(tn > 1e-14, tn, 1.0)
        y = q + (step / tn)[:, None, None] * t
        q2, ok = _batch_orthonormalize(y)
        val = np.where(ok, _batch_objective(x, q2), -1.0)
        improved = active & (val > best)
        significant = active & (val > best + 1e-13 * scale)
        q[improved] = q2[improved]
        best = np.where(improved, val, best)
        bad = np.where(significant, 0, bad + active)
        shrink = bad >= shrink_after
        step = np.where(shrink, step * 0.5, step)
        bad = np.where(shrink, 0, bad)
        active = step > min_step
    return best, q


def _warm_starts(x: np.ndarray) -> list[np.ndarray]:
    """Deterministic informed starts: singular-vector pairs and extreme
    eigenvector pairs of rotated Hermitian parts."""
    n = x.shape[0]
    starts = []

    def add(a, b):
        y = np.column_stack([a, b])
        try:
            starts.append(_orthonormalize(y))
        except ZeroDivisionError:
            pass

    u, _, vh = np.linalg.svd(x)
    v = vh.conj().T
    add(v[:, 0], u[:, 0])
    add(v[:, 0], v[:, 1])
    add(u[:, 0], u[:, 1])
    if n > 2:
        add(v[:, 0], u[:, 1])
    for theta in (0.0, math.pi / 4, math.pi / 2, 3 * math.pi / 4):
        ph = np.exp(-1j * theta)
        h = 0.5 * (ph * x + np.conj(ph) * x.conj().T)
        _, vecs = np.linalg.eigh(h)
        add(vecs[:, -1], vecs[:, 0])
    return starts


def delta2_estimate(x, restarts: int = DEFAULT_RESTARTS, seed: int = 0,
                    tol: Tolerances = DEFAULT_TOL,
                    alpha_grid=DEFAULT_ALPHA_GRID, a_grid=None,
                    search_iters: int = 3000, min_step: float = 1e-9) -> Delta2Estimate:
    """Lower-bound estimate of delta_2(X) via random-restart frame search.

    Deterministic given (X, restarts, seed): restart t draws from a Philox
    stream keyed by derive_trial_seed(seed, t); informed warm starts are
    seed-independent. For n = 2 every frame spans the whole space, so the
    objective is frame-invariant and the closed-form minor axis of W(X) is
    returned directly.
    """
    x = as_square(x)
    n = x.shape[0]
    if n < 2:
        raise DimensionTooSmall(f"delta2 needs n >= 2, got n = {n}")
    certificates = delta2_certificates(x, alpha_grid=alpha_grid, a_grid=a_grid, tol=tol)

    if n == 2:
        eye = np.eye(2, dtype=complex)
        return Delta2Estimate(
            value=math.sqrt(minor_axis_sq(x)),
            best_frame=Frame2(eye[:, 0], eye[:, 1]),
            restarts_used=0,
            certificates=certificates,
        )

    # distinct stream keys: restart t's start frame, its proposal stream, and
    # warm start i's proposal stream never share a Philox key
    starts = list(_warm_starts(x))
    seeds = [derive_trial_seed(seed, (1 << 32) + i) for i in range(len(starts))]
    for t in range(restarts):
        rng = make_rng(derive_trial_seed(seed, t))
        raw = rng.standard_normal((n, 2, 2))
        try:
            starts.append(_orthonormalize(raw[..., 0] + 1j * raw[..., 1]))
        except ZeroDivisionError:
            continue
        seeds.append(derive_trial_seed(seed, (2 << 32) + t))
    vals, frames = _search_frames(x, np.stack(starts), seeds,
                                  iters_cap=search_iters, min_step=min_step)
    k = int(np.argmax(vals))
    value = math.sqrt(max(0.0, float(vals[k])))
    best_q = frames[k]
    return Delta2Estimate(
        value=value,
        best_frame=Frame2(best_q[:, 0].copy(), best_q[:, 1].copy()),
        restarts_used=len(starts),
        certificates=certificates,
    )


def delta2_certificates(x, alpha_grid=DEFAULT_ALPHA_GRID, a_grid=None,
                        tol: Tolerances = DEFAULT_TOL) -> dict:
    """Closed-form lower bounds, all reported on the delta_2 scale.

    Keys: "prop39" = 2||X|| - |||X|+|X*|||; "cor36_alpha=a" for
    f(t)=t^{2a}, g(t)=t^{2-2a}; "cor37x2_k" = doubled inradius certificate
    at shift a_k (the doubled value bounds delta_2 because it is prop39
    applied to X - a I and delta_2 is translation invariant); the shifts
    used are recorded under "cor37_shifts".
    """
    x = as_square(x)
    n = x.shape[0]
    right = matrix_abs(x, "right")
    left = matrix_abs(x, "left")
    certs: dict = {}
    certs["prop39"] = 2.0 * operator_norm(x) - operator_norm(left + right)

    vals_r = np.maximum(np.linalg.eigvalsh(right), 0.0)
    vecs_r = np.linalg.eigh(right)[1]
    vals_l = np.maximum(np.linalg.eigvalsh(left), 0.0)
    vecs_l = np.linalg.eigh(left)[1]
    for alpha in alpha_grid:
        alpha = float(alpha)
        if not 0.0 < alpha < 1.0:
            raise BadAlpha(f"alpha must lie in (0,1), got {alpha}")
        f_r = (vecs_r * vals_r ** (2 * alpha)) @ vecs_r.conj().T
        g_r = (vecs_r * vals_r ** (2 - 2 * alpha)) @ vecs_r.conj().T
        f_l = (vecs_l * vals_l ** (2 * alpha)) @ vecs_l.conj().T
        certs[f"cor36_alpha={alpha:g}"] = operator_norm(f_r + g_r) - operator_norm(f_l + g_r)

    if a_grid is None:
        tau = complex(np.trace(x)) / n
        a_grid = [0j, tau]
    shifts = [complex(a) for a in a_grid]
    for k, a in enumerate(shifts):
        certs[f"cor37x2_{k}"] = 2.0 * inradius_certificate(x, a)
    certs["cor37_shifts"] = [[a.real, a.imag] for a in shifts]
    return certs


def inradius_certificate(x, a: complex = 0j) -> float:
    """Cor-3.7-style bound: ||X-aI|| - ||(|X-aI| + |X*-conj(a)I|)/2|| <= inradius."""
    x = as_square(x)
    y = x - complex(a) * np.eye(x.shape[0])
    return operator_norm(y) - 0.5 * operator_norm(matrix_abs(y, "right") + matrix_abs(y, "left"))


def max_delta2_certificate(certs: dict) -> float:
    vals = [v for k, v in certs.items() if isinstance(v, float)]
    return max(vals) if vals else 0.0
