"""Construction, validation and sampling of positive 2x2-block matrices
[[A, X], [X*, B]] with Hermitian PSD diagonal blocks.

Constructors either validate Gram-style inputs directly (assemble) or build
guaranteed-positive completions: X = A^{1/2} K B^{1/2} from a contraction K,
or B = X* A^{-1} X + S from the Schur complement with A positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_TOL, Tolerances
from .corelinalg import (as_square, check_hermitian, eigvalsh_desc, func_apply,
                         matrix_abs, operator_norm)
from .errors import (BadAlpha, BadKind, DimensionMismatch, NegativeInput,
                     NotContraction, NotPD, NotPSD)
from .rng import (complex_gaussian, haar_unitary, make_rng, random_contraction,
                  random_hermitian, random_pd, random_psd)


@dataclass(frozen=True)
class BlockPositive:
    a_block: np.ndarray
    b_block: np.ndarray
    x_block: np.ndarray

    @property
    def n(self) -> int:
        return self.a_block.shape[0]

    def assembled(self) -> np.ndarray:
        return np.block([[self.a_block, self.x_block],
                         [self.x_block.conj().T, self.b_block]])

    def scaled(self, t: float) -> "BlockPositive":
        return BlockPositive(t * self.a_block, t * self.b_block, t * self.x_block)

    def conjugated(self, u: np.ndarray) -> "BlockPositive":
        uh = u.conj().T
        return BlockPositive(uh @ self.a_block @ u, uh @ self.b_block @ u, uh @ self.x_block @ u)


@dataclass(frozen=True)
class FunctionPair:
    """f(t) = t^{2 alpha}, g(t) = t^{2 - 2 alpha} with alpha in (0, 1).

    Satisfies f g = t^2 and f(0) = g(0) = 0 identically; alpha = 1/2 is the
    literal pair f = g = t.
    """

    alpha: float = 0.5

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise BadAlpha(f"alpha must lie in (0,1), got {self.alpha}")

    def f(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(t, dtype=float) ** (2.0 * self.alpha)

    def g(self, t: np.ndarray) -> np.ndarray:
        return np.asarray(t, dtype=float) ** (2.0 - 2.0 * self.alpha)


def _check_psd(s: np.ndarray, what: str, tol: Tolerances) -> None:
    vals = np.linalg.eigvalsh(s)
    scale = 1.0 + float(np.max(np.abs(vals), initial=0.0))
    if vals.size and float(vals[0]) < -tol.assemble_psd * scale:
        raise NotPSD(f"{what} is not PSD: min eigenvalue {float(vals[0]):.6e}", float(vals[0]))


def assemble(a, x, b, tol: Tolerances = DEFAULT_TOL) -> BlockPositive:
    """Validate and wrap [[A, X], [X*, B]]; raises NotPSD / DimensionMismatch."""
    a = check_hermitian(a, tol)
    b = check_hermitian(b, tol)
    x = as_square(x)
    if not (a.shape == b.shape == x.shape):
        raise DimensionMismatch(f"blocks disagree: A{a.shape} X{x.shape} B{b.shape}")
    _check_psd(a, "A block", tol)
    _check_psd(b, "B block", tol)
    bp = BlockPositive(a, b, x)
    _check_psd(bp.assembled(), "assembled block matrix", tol)
    return bp


def from_contraction(a, b, k, tol: Tolerances = DEFAULT_TOL) -> BlockPositive:
    """Completion X = A^{1/2} K B^{1/2}; PSD for any contraction K."""
    a = check_hermitian(a, tol)
    b = check_hermitian(b, tol)
    k = as_square(k)
    if operator_norm(k) > 1.0 + 1e-10:
        raise NotContraction(f"||K|| = {operator_norm(k):.12f} exceeds 1")
    a_half = func_apply(np.sqrt, a, tol)
    b_half = func_apply(np.sqrt, b, tol)
    return assemble(a, a_half @ k @ b_half, b, tol)


def from_schur(a, x, s=None, tol: Tolerances = DEFAULT_TOL) -> BlockPositive:
    """Completion B = X* A^{-1} X + S for positive definite A and PSD S;
    S = None means the minimal completion S = 0."""
    a = check_hermitian(a, tol)
    x = as_square(x)
    if a.shape != x.shape:
        raise DimensionMismatch(f"A{a.shape} vs X{x.shape}")
    lam_min = float(np.linalg.eigvalsh(a)[0])
    if lam_min <= 1e-10:
        raise NotPD(f"A must be positive definite: min eigenvalue {lam_min:.3e}")
    if s is None:
        s = np.zeros_like(a)
    s = check_hermitian(s, tol)
    _check_psd(s, "S", tol)
    b = x.conj().T @ np.linalg.solve(a, x) + s
    return assemble(a, x, 0.5 * (b + b.conj().T), tol)


def witness_modulus(x, tol: Tolerances = DEFAULT_TOL) -> BlockPositive:
    """The modulus witness [[|X*|, X], [X*, |X|]]; PSD for every square X."""
    x = as_square(x)
    return assemble(matrix_abs(x, "left"), x, matrix_abs(x, "right"), tol)


def intro_equality_example(a: float, b: float, tol: Tolerances = DEFAULT_TOL) -> BlockPositive:
    """The 4x4 operator-norm equality family: A = diag(a,b), B = diag(b,a),
    X = [[0, a], [b, 0]] for nonnegative a, b."""
    if a < 0 or b < 0:
        raise NegativeInput(f"a, b must be nonnegative, got ({a}, {b})")
    return assemble(np.diag([a, b]).astype(complex),
                    np.array([[0.0, a], [b, 0.0]], dtype=complex),
                    np.diag([b, a]).astype(complex), tol)


def partial_trace_sum(bp: BlockPositive) -> np.ndarray:
    """Sum of the diagonal blocks A + B."""
    return bp.a_block + bp.b_block


_KINDS = ("general", "normal_offdiag", "essentially_hermitian_offdiag", "unitary_offdiag")


def sample_random(n: int, kind: str, seed: int, r: float = 1.0, center: complex = 0j,
                  tol: Tolerances = DEFAULT_TOL) -> BlockPositive:
    """Deterministic random instance with the requested off-diagonal structure.

    kinds: "general" (unstructured X), "normal_offdiag" (normal X with
    spectrum in the disc of radius r about center), "essentially_hermitian_offdiag"
    (X = alpha I + e^{i phi} H), "unitary_offdiag". The completion is always
    B = X* A^{-1} X + S with random positive definite A and random PSD S.
    """
    if kind not in _KINDS:
        raise BadKind(f"kind must be one of {_KINDS}, got {kind!r}")
    if n < 1:
        raise DimensionMismatch(f"n must be >= 1, got {n}")
    rng = make_rng(seed)
    if kind == "general":
        x = complex_gaussian(rng, n, n)
    elif kind == "normal_offdiag":
        v = haar_unitary(rng, n)
        rho = rng.uniform(0.0, 1.0, n)
        phi = rng.uniform(0.0, 2.0 * np.pi, n)
        eigs = complex(center) + float(r) * rho * np.exp(1j * phi)
        x = (v * eigs) @ v.conj().T
    elif kind == "essentially_hermitian_offdiag":
        h = random_hermitian(rng, n)
        alpha = complex(*rng.standard_normal(2))
        phi = rng.uniform(0.0, 2.0 * np.pi)
        x = alpha * np.eye(n) + np.exp(1j * phi) * h
    else:
        x = haar_unitary(rng, n)
    a = random_pd(rng, n, floor=0.2)
    s = random_psd(rng, n) if rng.uniform() < 0.5 else None
    return from_schur(a, x, s, tol)


def extract_contraction(bp: BlockPositive, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Recover K = A^{-1/2} X B^{-1/2} (a contraction whenever the block is PSD
    and A, B are positive definite)."""
    vals_a, vecs_a = np.linalg.eigh(bp.a_block)
    vals_b, vecs_b = np.linalg.eigh(bp.b_block)
    if float(vals_a[0]) <= 1e-12 or float(vals_b[0]) <= 1e-12:
        raise NotPD("extract_contraction needs positive definite A and B")
    a_inv_half = (vecs_a * vals_a**-0.5) @ vecs_a.conj().T
    b_inv_half = (vecs_b * vals_b**-0.5) @ vecs_b.conj().T
    return a_inv_half @ bp.x_block @ b_inv_half
