"""Dense complex linear algebra kernels: Hermitian eigendecomposition, SVD,
functional calculus, polar decomposition, Schatten norms, PSD tests.

Conventions: eigenvalues and singular values are sorted descending
(lambda_1 >= ... >= lambda_n). All functions are pure; inputs are never
mutated.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .errors import BadExponent, FunctionDomain, NonFinite, NotHermitian, NotPSD


def as_square(x) -> np.ndarray:
    x = np.asarray(x, dtype=complex)
    if x.ndim != 2 or x.shape[0] != x.shape[1]:
        raise NonFinite(f"expected a square matrix, got shape {x.shape}")
    check_finite(x)
    return x


def check_finite(x: np.ndarray) -> None:
    if not np.all(np.isfinite(x.real)) or not np.all(np.isfinite(x.imag)):
        raise NonFinite("matrix has NaN/Inf entries")


def frob(x: np.ndarray) -> float:
    return float(np.linalg.norm(x))


def check_hermitian(s: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    s = as_square(s)
    if frob(s - s.conj().T) > tol.symmetry * (1.0 + frob(s)):
        raise NotHermitian(f"symmetry residual {frob(s - s.conj().T):.3e} too large")
    return 0.5 * (s + s.conj().T)


@dataclass(frozen=True)
class HermitianEigenDecomp:
    """Eigenvalues sorted descending; eigenvectors as matching columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


@dataclass(frozen=True)
class SingularDecomp:
    """X = u_factor @ diag(singular_values) @ v_factor^*; values descending."""

    u_factor: np.ndarray
    singular_values: np.ndarray
    v_factor: np.ndarray


def hermitian_eig(s, tol: Tolerances = DEFAULT_TOL) -> HermitianEigenDecomp:
    """Eigendecomposition of a Hermitian matrix, eigenvalues descending."""
    h = check_hermitian(s, tol)
    vals, vecs = np.linalg.eigh(h)
    return HermitianEigenDecomp(vals[::-1].copy(), vecs[:, ::-1].copy())


def eigvalsh_desc(s: np.ndarray) -> np.ndarray:
    """Eigenvalues of a (trusted) Hermitian matrix, sorted descending."""
    return np.linalg.eigvalsh(0.5 * (s + s.conj().T))[::-1]


def svd_decompose(x) -> SingularDecomp:
    """Full SVD with descending singular values."""
    x = np.asarray(x, dtype=complex)
    check_finite(x)
    u, s, vh = np.linalg.svd(x)
    return SingularDecomp(u, s, vh.conj().T)


def matrix_abs(x, side: str = "right") -> np.ndarray:
    """Modulus of X: side='right' is |X| = (X*X)^{1/2}, 'left' is |X*| = (XX*)^{1/2}."""
    x = as_square(x)
    d = svd_decompose(x)
    if side == "right":
        w = d.v_factor
    elif side == "left":
        w = d.u_factor
    else:
        raise ValueError(f"side must be 'left' or 'right', got {side!r}")
    m = (w * d.singular_values) @ w.conj().T
    return 0.5 * (m + m.conj().T)


def func_apply(f: Callable[[np.ndarray], np.ndarray], s, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Apply a scalar function on [0, inf) to a Hermitian PSD matrix: V f(L) V*.

    Eigenvalues within the PSD tolerance below zero are clamped to 0 before
    applying f, so functions like sqrt stay in-domain on roundoff-PSD input.
    """
    dec = hermitian_eig(s, tol)
    lam = dec.eigenvalues
    scale = 1.0 + float(np.max(np.abs(lam), initial=0.0))
    if np.min(lam, initial=0.0) < -tol.assemble_psd * scale:
        raise NotPSD(f"matrix not PSD: min eigenvalue {np.min(lam):.3e}", float(np.min(lam)))
    lam = np.maximum(lam, 0.0)
    with np.errstate(all="ignore"):
        flam = np.asarray(f(lam), dtype=float)
    if flam.shape != lam.shape or not np.all(np.isfinite(flam)):
        raise FunctionDomain("function is undefined (non-finite) at an eigenvalue")
    v = dec.eigenvectors
    m = (v * flam) @ v.conj().T
    return 0.5 * (m + m.conj().T)


def polar_decompose(x) -> tuple[np.ndarray, np.ndarray]:
    """Polar decomposition X = U |X| with unitary U = u_factor @ v_factor^*.

    For singular X the kernel part of U is completed by the SVD's own
    (deterministic) pairing of leftover singular vectors; any completion
    satisfies phi(|X*|) = U phi(|X|) U*.
    """
    x = as_square(x)
    d = svd_decompose(x)
    u = d.u_factor @ d.v_factor.conj().T
    m = (d.v_factor * d.singular_values) @ d.v_factor.conj().T
    return u, 0.5 * (m + m.conj().T)


def schatten_norm(x, p) -> float:
    """Schatten p-norm: the l_p norm of the singular values (p=inf: largest)."""
    p = float(p)
    if not (p >= 1.0):
        raise BadExponent(f"Schatten exponent must satisfy p >= 1, got {p}")
    x = np.asarray(x, dtype=complex)
    check_finite(x)
    if x.size == 0:
        return 0.0
    sv = np.linalg.svd(x, compute_uv=False)
    if np.isinf(p):
        return float(sv[0])
    if p == 1.0:
        return float(np.sum(sv))
    if p == 2.0:
        return float(np.sqrt(np.sum(sv * sv)))
    return float(np.sum(sv**p) ** (1.0 / p))


def operator_norm(x) -> float:
    return schatten_norm(x, np.inf)


def min_eig_psd_check(s, tol: Tolerances = DEFAULT_TOL) -> tuple[float, bool]:
    """(min eigenvalue, PSD predicate at relative tolerance)."""
    h = check_hermitian(s, tol)
    if h.size == 0:
        return 0.0, True
    vals = np.linalg.eigvalsh(h)
    scale = 1.0 + float(np.max(np.abs(vals)))
    mn = float(vals[0])
    return mn, bool(mn >= -tol.psd * scale)


def normality_defect(x) -> float:
    """|| X*X - XX* ||_F / (1 + ||X||_F^2); zero iff X is normal."""
    x = as_square(x)
    comm = x.conj().T @ x - x @ x.conj().T
    return frob(comm) / (1.0 + frob(x) ** 2)
