"""Orthonormal basis transforms: construction, composition and application."""
from __future__ import annotations

from functools import lru_cache

import numpy as np
import scipy.fft
import scipy.linalg

from .model import OrthonormalBasis, rng_from_seed


@lru_cache(maxsize=16)
def identity_basis(n: int) -> OrthonormalBasis:
    if n < 1:
        raise ValueError("n must be positive")
    return OrthonormalBasis(np.eye(n), "identity")


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


@lru_cache(maxsize=16)
def walsh_hadamard_basis(n: int) -> OrthonormalBasis:
    """Sylvester-ordered Hadamard matrix scaled to entries +-1/sqrt(n).

    This is the real, flat stand-in for a Fourier-type basis: every entry has
    the same magnitude, so its coherence bound is exactly 1.
    """
    if not _is_power_of_two(n):
        raise ValueError(f"Walsh-Hadamard basis needs a power-of-two dimension, got {n}")
    h = scipy.linalg.hadamard(n).astype(float) / np.sqrt(n)
    return OrthonormalBasis(h, "walsh_hadamard")


@lru_cache(maxsize=16)
def dct_basis(n: int) -> OrthonormalBasis:
    """Orthonormal DCT-II matrix (rows are the cosine atoms)."""
    if n < 1:
        raise ValueError("n must be positive")
    d = scipy.fft.dct(np.eye(n), type=2, norm="ortho", axis=0)
    return OrthonormalBasis(d, "dct_like")


def random_orthonormal_basis(n: int, seed: int) -> OrthonormalBasis:
    """Haar-distributed orthonormal matrix from the QR factors of a Gaussian matrix.

    Column signs are fixed so that ``R`` has a positive diagonal, which makes
    the result a deterministic function of the seed.
    """
    if n < 1:
        raise ValueError("n must be positive")
    g = rng_from_seed(seed).standard_normal((n, n))
    q, r = np.linalg.qr(g)
    signs = np.sign(np.diag(r))
    signs[signs == 0] = 1.0
    return OrthonormalBasis(q * signs, "random_orthonormal")


def make_basis(kind: str, n: int, seed: int = 0) -> OrthonormalBasis:
    """Build a basis from a short tag (as used in configs and on the CLI)."""
    if kind in ("identity", "I"):
        return identity_basis(n)
    if kind in ("walsh", "walsh_hadamard", "hadamard"):
        return walsh_hadamard_basis(n)
    if kind in ("dct", "dct_like"):
        return dct_basis(n)
    if kind in ("random", "random_orthonormal"):
        return random_orthonormal_basis(n, seed)
    raise ValueError(f"unknown basis kind {kind!r}")


def compose(first: OrthonormalBasis, second: OrthonormalBasis) -> OrthonormalBasis:
    """Basis that applies ``first`` and then ``second`` (matrix ``second @ first``)."""
    if first.dimension != second.dimension:
        raise ValueError(f"dimension mismatch: {first.dimension} vs {second.dimension}")
    factors = []
    for b in (first, second):
        factors.extend(b.factors if b.kind == "composed" else (b,))
    return OrthonormalBasis(second.matrix @ first.matrix, "composed", tuple(factors))


def transpose(basis: OrthonormalBasis) -> OrthonormalBasis:
    """The inverse basis. Keeps the kind of symmetric flat bases, else ``composed``."""
    if basis.kind == "identity":
        return basis
    if basis.kind == "composed":
        factors = tuple(transpose(f) for f in reversed(basis.factors))
        return OrthonormalBasis(basis.matrix.T, "composed", factors)
    if basis.kind == "walsh_hadamard":
        return basis
    return OrthonormalBasis(basis.matrix.T, basis.kind)


def coherence_bound(basis: OrthonormalBasis) -> float:
    """Boundedness constant ``Z = sqrt(n) * max |U_qk|``; always >= 1."""
    return float(np.sqrt(basis.dimension) * np.max(np.abs(basis.matrix)))


def _check_vector(basis: OrthonormalBasis, v) -> np.ndarray:
    v = np.asarray(getattr(v, "values", v), dtype=float)
    if v.shape != (basis.dimension,):
        raise ValueError(f"vector of shape {v.shape} does not match basis dimension {basis.dimension}")
    return v


def forward_transform(basis: OrthonormalBasis, v) -> np.ndarray:
    """``B @ v``."""
    return basis.matrix @ _check_vector(basis, v)


def inverse_transform(basis: OrthonormalBasis, v) -> np.ndarray:
    """``B^-1 @ v``, computed as ``B.T @ v``."""
    return basis.matrix.T @ _check_vector(basis, v)
