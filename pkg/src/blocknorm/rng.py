"""Deterministic seed derivation and random matrix generators.

Every stochastic routine in the package takes an explicit 64-bit seed and
draws from a counter-based Philox stream keyed by that seed, so trial i
never depends on trial j and identical seeds reproduce identical bits.
"""

from __future__ import annotations

import hashlib

import numpy as np

_M64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def _mix64(z: int) -> int:
    # splitmix64 finalizer (Steele/Lea/Flood constants); bijective on u64
    z &= _M64
    z ^= z >> 30
    z = (z * 0xBF58476D1CE4E5B9) & _M64
    z ^= z >> 27
    z = (z * 0x94D049BB133111EB) & _M64
    z ^= z >> 31
    return z


def derive_trial_seed(master: int, trial_index: int) -> int:
    """Stateless per-trial sub-seed.

    Algorithm: z = master + 0x9E3779B97F4A7C15 * (trial_index + 1) mod 2^64,
    then mix64(mix64(z) ^ master) where mix64 is the splitmix64 finalizer.
    Injective in trial_index for fixed master (odd multiplier, bijective
    mixing). Pinned value: derive_trial_seed(0, 0) == 0x48218226FF3CD4BF.
    """
    z = (int(master) + _GOLDEN * (int(trial_index) + 1)) & _M64
    return _mix64(_mix64(z) ^ (int(master) & _M64))


def seed_for_label(master: int, label: str) -> int:
    """Derive a sub-seed from a string label (statement id, pass name, ...)."""
    h = hashlib.sha256(label.encode("utf-8")).digest()
    return derive_trial_seed(master, int.from_bytes(h[:8], "little"))


def make_rng(seed: int) -> np.random.Generator:
    """Philox (counter-based) generator keyed by a 64-bit seed."""
    return np.random.Generator(np.random.Philox(key=int(seed) & _M64))


def complex_gaussian(rng: np.random.Generator, *shape: int) -> np.ndarray:
    """i.i.d. standard complex Gaussian entries (unit variance overall)."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def haar_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-ish unitary via QR of a complex Gaussian with phase fix."""
    q, r = np.linalg.qr(complex_gaussian(rng, n, n))
    d = np.diagonal(r)
    ph = d / np.where(np.abs(d) > 0, np.abs(d), 1.0)
    return q * ph


def random_psd(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    """Random PSD matrix A = G G*/n, scaled."""
    g = complex_gaussian(rng, n, n)
    a = (g @ g.conj().T) / n
    return scale * 0.5 * (a + a.conj().T)


def random_pd(rng: np.random.Generator, n: int, floor: float = 0.05) -> np.ndarray:
    """Random positive definite matrix, eigenvalues bounded below by ~floor."""
    return random_psd(rng, n) + floor * np.eye(n)


def random_contraction(rng: np.random.Generator, n: int) -> np.ndarray:
    """Gaussian matrix divided by its top singular value times (1+u), u~U[0,1]."""
    g = complex_gaussian(rng, n, n)
    smax = np.linalg.svd(g, compute_uv=False)[0]
    u = rng.uniform(0.0, 1.0)
    return g / (smax * (1.0 + u))


def random_hermitian(rng: np.random.Generator, n: int, scale: float = 1.0) -> np.ndarray:
    g = complex_gaussian(rng, n, n)
    return scale * 0.5 * (g + g.conj().T)
