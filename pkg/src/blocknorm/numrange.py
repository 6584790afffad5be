"""Geometry of the numerical range W(X) = {x*Xx : ||x|| = 1}.

W(X) is convex (Toeplitz-Hausdorff), so it is fully described by its support
function h(theta) = max Re(e^{-i theta} z) over z in W(X), which equals the
top eigenvalue of the rotated Hermitian part (e^{-i theta} X + e^{i theta} X*)/2.
From sampled (and locally refined) support values we derive:

  * width      -- min over theta of h(theta) + h(theta+pi),
  * inradius   -- Chebyshev center LP over support half-planes, tightened by
                  cutting-plane rounds against the exact support function,
  * indiameter -- 2 * inradius,
  * dist_zero  -- max(0, sup_theta -h(theta)), the distance from 0 to W(X).

Grid support values are computed with one stacked eigvalsh call; scalar
refinements use golden-section search (h is continuous but only piecewise
smooth, so derivative-free refinement).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.optimize import linprog, minimize

from .config import DEFAULT_TOL, Tolerances
from .corelinalg import as_square, eigvalsh_desc, operator_norm
from .errors import BlocknormError, GridTooSmall, NonFinite

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class RangeSummary:
    theta_grid: np.ndarray
    support_values: np.ndarray
    boundary_points: np.ndarray
    width: float
    inradius: float
    indiameter: float
    chebyshev_center: complex
    dist_zero: float


@dataclass(frozen=True)
class Ellipse:
    """Elliptical disc with the given foci and full minor-axis length."""

    focus1: complex
    focus2: complex
    minor_axis: float

    @property
    def center(self) -> complex:
        return 0.5 * (self.focus1 + self.focus2)

    def support(self, theta) -> np.ndarray:
        """Support function of the elliptical disc at angle(s) theta."""
        theta = np.asarray(theta, dtype=float)
        f = 0.5 * (self.focus1 - self.focus2)
        b = 0.5 * self.minor_axis
        a = math.hypot(b, abs(f))
        phi = np.angle(f) if f != 0 else 0.0
        c = self.center
        radial = np.sqrt((a * np.cos(theta - phi)) ** 2 + (b * np.sin(theta - phi)) ** 2)
        return np.cos(theta) * c.real + np.sin(theta) * c.imag + radial


class ScalarDistance(NamedTuple):
    dist: float
    minimizer: complex
    converged: bool = True


def _herm_part(x: np.ndarray, theta: float) -> np.ndarray:
    ph = np.exp(-1j * theta)
    return 0.5 * (ph * x + np.conj(ph) * x.conj().T)


def support_function(x, theta: float) -> tuple[float, complex]:
    """(h(theta), attaining boundary point v*Xv) for the top eigenvector v."""
    x = as_square(x)
    vals, vecs = np.linalg.eigh(_herm_part(x, theta))
    v = vecs[:, -1]
    point = complex(v.conj() @ (x @ v))
    return float(vals[-1]), point


def _support_h(x: np.ndarray, theta: float) -> float:
    return float(np.linalg.eigvalsh(_herm_part(x, theta))[-1])


def _support_grid(x: np.ndarray, thetas: np.ndarray, want_vectors: bool):
    ph = np.exp(-1j * thetas)[:, None, None]
    stack = 0.5 * (ph * x + np.conj(ph) * np.conj(x.transpose()))
    if not want_vectors:
        return np.linalg.eigvalsh(stack)[:, -1], None
    vals, vecs = np.linalg.eigh(stack)
    top = vecs[..., -1]
    points = np.einsum("ti,ij,tj->t", top.conj(), x, top)
    return vals[:, -1], points


def _golden(f, a: float, b: float, iters: int = 70):
    """Golden-section minimization of f on [a, b]; returns (x_best, f_best)."""
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc <= fd else (d, fd)
    for _ in range(iters):
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
        if fc <= fd and fc < best_f:
            best_x, best_f = c, fc
        elif fd < fc and fd < best_f:
            best_x, best_f = d, fd
        if (b - a) < 1e-12:
            break
    return best_x, best_f


def _chebyshev_lp(thetas: np.ndarray, hvals: np.ndarray) -> tuple[complex, float]:
    a_ub = np.column_stack([np.cos(thetas), np.sin(thetas), np.ones_like(thetas)])
    res = linprog(
        c=[0.0, 0.0, -1.0],
        A_ub=a_ub,
        b_ub=hvals,
        bounds=[(None, None), (None, None), (0.0, None)],
        method="highs",
    )
    if not res.success:
        raise BlocknormError(f"Chebyshev LP failed: {res.message}")
    cx, cy, r = res.x
    return complex(cx, cy), float(r)


def _refine_inradius(x: np.ndarray, thetas: np.ndarray, hvals: np.ndarray, scale: float):
    """Cutting-plane loop: the grid LP relaxes the true problem (it drops the
    off-grid support constraints), so hunt for violated angles and re-solve
    until the Chebyshev disc respects the exact support function."""
    th = list(thetas)
    hv = list(hvals)
    center, radius = _chebyshev_lp(np.array(th), np.array(hv))
    step = thetas[1] - thetas[0] if len(thetas) > 1 else math.pi
    for _ in range(16):
        def margin(t, c=center, r=radius):
            return _support_h(x, t) - (math.cos(t) * c.real + math.sin(t) * c.imag) - r

        base = np.array(hv) - (np.cos(th) * center.real + np.sin(th) * center.imag) - radius
        candidates = np.argsort(base)[:8]
        new_angles = []
        worst = 0.0
        for k in candidates:
            t0 = th[k]
            tb, mb = _golden(margin, t0 - step, t0 + step, iters=40)
            if mb < -1e-13 * scale:
                new_angles.append(tb)
                worst = min(worst, mb)
        if not new_angles:
            break
        for t in new_angles:
            th.append(t)
            hv.append(_support_h(x, t))
        center, radius = _chebyshev_lp(np.array(th), np.array(hv))
    return center, max(0.0, radius)


def range_summary(x, grid_size: int = 720, tol: Tolerances = DEFAULT_TOL,
                  refine: bool = True) -> RangeSummary:
    """Sampled numerical-range geometry; see module docstring for the pieces.

    refine=False skips the cutting-plane tightening of the Chebyshev disc:
    the grid LP then slightly overestimates the inradius (it relaxes the true
    problem), which is still a sound upper bound for delta_2 consumers.
    """
    x = as_square(x)
    if grid_size < 16:
        raise GridTooSmall(f"grid_size must be >= 16, got {grid_size}")
    m = grid_size + (grid_size % 2)  # even grid pairs theta with theta+pi
    thetas = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    n = x.shape[0]
    if n == 0:
        z = np.zeros(m)
        return RangeSummary(thetas, z, z.astype(complex), 0.0, 0.0, 0.0, 0j, 0.0)
    hs, points = _support_grid(x, thetas, want_vectors=True)
    scale = 1.0 + float(np.max(np.abs(hs)))

    # width: refine min of h(t)+h(t+pi) around the grid minimum
    half = m // 2
    wgrid = hs[:half] + hs[half:]
    k0 = int(np.argmin(wgrid))
    dt = thetas[1] - thetas[0]

    def wfun(t):
        return _support_h(x, t) + _support_h(x, t + math.pi)

    _, wref = _golden(wfun, thetas[k0] - dt, thetas[k0] + dt)
    width = max(0.0, min(float(np.min(wgrid)), wref))

    # distance from 0 to W(X): max(0, sup -h), refined around the grid max
    k1 = int(np.argmin(hs))
    _, neg = _golden(lambda t: _support_h(x, t), thetas[k1] - dt, thetas[k1] + dt)
    dist_zero = max(0.0, -min(float(np.min(hs)), neg))

    if width <= tol.degenerate_width * scale or n == 1:
        # segment or point: inradius is exactly 0, center is the midpoint
        k2 = int(np.argmax(wgrid))
        t2 = thetas[k2]
        p1 = support_function(x, t2)[1]
        p2 = support_function(x, t2 + math.pi)[1]
        center = 0.5 * (p1 + p2)
        inradius = 0.0
    elif refine:
        center, inradius = _refine_inradius(x, thetas, hs, scale)
    else:
        center, inradius = _chebyshev_lp(thetas, hs)
        inradius = max(0.0, inradius)

    return RangeSummary(
        theta_grid=thetas,
        support_values=hs,
        boundary_points=points,
        width=width,
        inradius=inradius,
        indiameter=2.0 * inradius,
        chebyshev_center=center,
        dist_zero=dist_zero,
    )


def dist_zero_of(x, grid_size: int = 720) -> float:
    """Distance from 0 to W(X) without the LP (cheap path for verifiers)."""
    x = as_square(x)
    if x.shape[0] == 0:
        return 0.0
    m = grid_size + (grid_size % 2)
    thetas = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    hs, _ = _support_grid(x, thetas, want_vectors=False)
    k1 = int(np.argmin(hs))
    dt = thetas[1] - thetas[0]
    _, neg = _golden(lambda t: _support_h(x, t), thetas[k1] - dt, thetas[k1] + dt)
    return max(0.0, -min(float(np.min(hs)), neg))


def indiameter_of(x, grid_size: int = 720, refine: bool = False) -> float:
    """Indiameter of W(X) without boundary vectors; refine=False leaves the
    (upward-erring) grid LP value, a sound upper bound for delta_2."""
    x = as_square(x)
    n = x.shape[0]
    if n <= 1:
        return 0.0
    m = grid_size + (grid_size % 2)
    thetas = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    hs, _ = _support_grid(x, thetas, want_vectors=False)
    scale = 1.0 + float(np.max(np.abs(hs)))
    half = m // 2
    wgrid = hs[:half] + hs[half:]
    if float(np.min(wgrid)) <= DEFAULT_TOL.degenerate_width * scale:
        return 0.0
    if refine:
        _, r = _refine_inradius(x, thetas, hs, scale)
    else:
        _, r = _chebyshev_lp(thetas, hs)
    return 2.0 * max(0.0, r)


def width_of(x, grid_size: int = 720) -> float:
    """Width of W(X) without the LP (cheap path for verifiers)."""
    x = as_square(x)
    if x.shape[0] <= 1:
        return 0.0
    m = grid_size + (grid_size % 2)
    thetas = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    hs, _ = _support_grid(x, thetas, want_vectors=False)
    half = m // 2
    wgrid = hs[:half] + hs[half:]
    k0 = int(np.argmin(wgrid))
    dt = thetas[1] - thetas[0]
    _, wref = _golden(lambda t: _support_h(x, t) + _support_h(x, t + math.pi), thetas[k0] - dt, thetas[k0] + dt)
    return max(0.0, min(float(np.min(wgrid)), wref))


def ellipse_2x2(x) -> Ellipse:
    """Elliptical range of a 2x2 matrix: foci at the eigenvalues, minor axis
    sqrt(max(0, tr(X*X) - |l1|^2 - |l2|^2))."""
    x = as_square(x)
    if x.shape != (2, 2):
        raise NonFinite(f"ellipse_2x2 needs a 2x2 matrix, got {x.shape}")
    tr = x[0, 0] + x[1, 1]
    det = x[0, 0] * x[1, 1] - x[0, 1] * x[1, 0]
    disc = np.sqrt(complex(tr * tr / 4.0 - det))
    mu1, mu2 = tr / 2.0 + disc, tr / 2.0 - disc
    gram = float(np.sum(np.abs(x) ** 2))
    minor_sq = max(0.0, gram - abs(mu1) ** 2 - abs(mu2) ** 2)
    return Ellipse(complex(mu1), complex(mu2), math.sqrt(minor_sq))


def dist_to_scalars(x, grid: int = 33, budget: int = 800) -> ScalarDistance:
    """min over complex lambda of ||X - lambda I||_inf and its minimizer.

    The objective is convex, so a coarse grid start plus Nelder-Mead and a
    compass-search polish reaches the global minimum; the reported value is
    always the objective at a concrete lambda (an upper bound on the true
    distance, which keeps downstream uses sound).
    """
    x = as_square(x)
    n = x.shape[0]
    if n == 0:
        return ScalarDistance(0.0, 0j, True)
    if n == 1:
        return ScalarDistance(0.0, complex(x[0, 0]), True)
    eye = np.eye(n)
    s = operator_norm(x)
    if s == 0.0:
        return ScalarDistance(0.0, 0j, True)

    def f(v):
        lam = complex(v[0], v[1])
        return float(np.linalg.svd(x - lam * eye, compute_uv=False)[0])

    axis = np.linspace(-s, s, grid)
    re, im = np.meshgrid(axis, axis, indexing="ij")
    lams = (re + 1j * im).ravel()
    stack = x[None, :, :] - lams[:, None, None] * eye[None, :, :]
    vals = np.linalg.svd(stack, compute_uv=False)[:, 0]
    k = int(np.argmin(vals))
    best = np.array([lams[k].real, lams[k].imag])

    res = minimize(f, best, method="Nelder-Mead",
                   options={"xatol": 1e-12, "fatol": 1e-14, "maxfev": budget})
    pt, val = (res.x, float(res.fun)) if res.fun <= vals[k] else (best, float(vals[k]))

    # compass polish: robust against Nelder-Mead stalling on the kinks of sigma_max
    dirs = np.array([[1, 0], [-1, 0], [0, 1], [0, -1], [1, 1], [1, -1], [-1, 1], [-1, -1]], float)
    dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
    step = max(1e-3 * s, 1e-12)
    evals = 0
    converged = True
    while step > 1e-11 * (1.0 + s):
        moved = False
        for d in dirs:
            cand = pt + step * d
            fv = f(cand)
            evals += 1
            if fv < val:
                pt, val, moved = cand, fv, True
                break
        if not moved:
            step *= 0.5
        if evals > 4 * budget:
            converged = False
            break
    return ScalarDistance(float(val), complex(pt[0], pt[1]), converged)


def essential_hermitian_defect(x, grid_size: int = 720) -> float:
    """Width of W(X); X is essentially Hermitian iff this is ~0 (segment range)."""
    return width_of(x, grid_size)


def smallest_enclosing_disc(points) -> tuple[complex, float]:
    """Smallest disc containing the given complex points (Welzl, deterministic)."""
    pts = [complex(p) for p in np.asarray(points, dtype=complex).ravel()]
    if not pts:
        return 0j, 0.0

    def in_disc(c, r, p):
        return abs(p - c) <= r * (1.0 + 1e-12) + 1e-14

    def disc2(p, q):
        return 0.5 * (p + q), 0.5 * abs(p - q)

    def disc3(p, q, r):
        # circumcenter via perpendicular bisector intersection
        ax, ay = p.real, p.imag
        bx, by = q.real, q.imag
        cx, cy = r.real, r.imag
        d = 2.0 * (ax * (by - cy) + bx * (cy - ay) + cx * (ay - by))
        if abs(d) < 1e-30:
            return None
        ux = ((ax * ax + ay * ay) * (by - cy) + (bx * bx + by * by) * (cy - ay)
              + (cx * cx + cy * cy) * (ay - by)) / d
        uy = ((ax * ax + ay * ay) * (cx - bx) + (bx * bx + by * by) * (ax - cx)
              + (cx * cx + cy * cy) * (bx - ax)) / d
        c = complex(ux, uy)
        return c, abs(p - c)

    c, r = pts[0], 0.0
    for i, p in enumerate(pts):
        if in_disc(c, r, p):
            continue
        c, r = p, 0.0
        for j in range(i):
            q = pts[j]
            if in_disc(c, r, q):
                continue
            c, r = disc2(p, q)
            for k in range(j):
                w = pts[k]
                if in_disc(c, r, w):
                    continue
                d3 = disc3(p, q, w)
                if d3 is not None:
                    c, r = d3
    return c, r
