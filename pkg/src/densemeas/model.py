"""Core value types shared across the package.

All containers are frozen dataclasses holding read-only numpy arrays, so they
can be handed to worker processes or threads without copying defensively.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

ORTHONORMAL_TOL = 1e-9
BASIS_KINDS = ("identity", "walsh_hadamard", "dct_like", "random_orthonormal", "composed")
MASK_MODES = ("raw01", "centered")
VALUE_DISTS = ("unit", "gaussian", "uniform")


def mix_seed(seed: int, index: int) -> int:
    """Derive a child seed from ``(seed, index)`` with the splitmix64 finalizer.

    The state is ``seed + (index + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``,
    followed by the standard splitmix64 xor-shift-multiply rounds. Every
    per-round and per-trial random stream in the package is seeded this way,
    so ensembles depend only on ``(master_seed, index)`` and not on the order
    in which rows or trials are evaluated.
    """
    z = (int(seed) + (int(index) + 1) * _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def rng_from_seed(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed (negative seeds are wrapped)."""
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))


def _frozen(a, dtype=float) -> np.ndarray:
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class SparseSignal:
    """Classical length-n representation of the sparse state.

    ``support`` is derived from the values, so it can never disagree with
    them.
    """

    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values)
        if values.ndim != 1 or values.size == 0:
            raise ValueError("signal values must be a non-empty 1-d vector")
        if not np.all(np.isfinite(values)):
            raise ValueError("signal values must be finite")
        object.__setattr__(self, "values", values)

    @property
    def length(self) -> int:
        return self.values.size

    @property
    def support(self) -> frozenset:
        return frozenset(int(i) for i in np.flatnonzero(self.values))

    @property
    def sparsity(self) -> int:
        return int(np.count_nonzero(self.values))

    def normalized(self) -> "SparseSignal":
        norm = np.linalg.norm(self.values)
        if norm == 0:
            raise ValueError("cannot normalize the zero signal")
        return SparseSignal(self.values / norm)


@dataclass(frozen=True)
class OrthonormalBasis:
    """Real n x n orthonormal matrix standing for ``U_B`` or ``U(theta')``.

    For ``kind == "composed"`` the factors are kept in application order, so
    the matrix equals ``factors[-1] @ ... @ factors[0]``.
    """

    matrix: np.ndarray
    kind: str
    factors: tuple = ()

    def __post_init__(self):
        m = _frozen(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ValueError(f"basis matrix must be square and non-empty, got shape {m.shape}")
        if self.kind not in BASIS_KINDS:
            raise ValueError(f"unknown basis kind {self.kind!r}")
        dev = orthonormality_residual(m)
        if dev > ORTHONORMAL_TOL:
            raise ValueError(f"matrix is not orthonormal (max |M^T M - I| = {dev:.3e})")
        if self.kind == "composed":
            if not self.factors:
                raise ValueError("composed basis must record its factors")
            prod = np.eye(m.shape[0])
            for f in self.factors:
                if f.dimension != m.shape[0]:
                    raise ValueError("factor dimension mismatch")
                prod = f.matrix @ prod
            if np.max(np.abs(prod - m)) > ORTHONORMAL_TOL:
                raise ValueError("composed matrix does not equal the product of its factors")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "factors", tuple(self.factors))

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]


def orthonormality_residual(m: np.ndarray) -> float:
    """Max absolute entry of ``m.T @ m - I``."""
    m = np.asarray(m, dtype=float)
    return float(np.max(np.abs(m.T @ m - np.eye(m.shape[1]))))


@dataclass(frozen=True)
class BernoulliMask:
    """Fair-coin keep/discard bits for one measurement round."""

    bits: np.ndarray

    def __post_init__(self):
        bits = _frozen(self.bits, dtype=np.int8)
        if bits.ndim != 1 or bits.size == 0:
            raise ValueError("mask must be a non-empty 1-d vector")
        if not np.all((bits == 0) | (bits == 1)):
            raise ValueError("mask entries must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @property
    def length(self) -> int:
        return self.bits.size

    @property
    def centered_view(self) -> np.ndarray:
        """The bits mapped 0 -> -1, 1 -> +1."""
        return 2.0 * self.bits - 1.0

    def vector(self, mode: str) -> np.ndarray:
        if mode == "raw01":
            return self.bits.astype(float)
        if mode == "centered":
            return self.centered_view
        raise ValueError(f"unknown mask mode {mode!r}")


@dataclass(frozen=True)
class MeasurementEnsemble:
    """R measurement rows stacked into an R x n sensing matrix.

    ``mode`` is ``"raw01"`` or ``"centered"`` for mask ensembles and
    ``"subset"`` for row-subset projector ensembles, in which case
    ``selected_rows`` holds the chosen row indices and ``masks`` is empty.
    """

    masks: tuple
    sensing_matrix: np.ndarray
    mode: str
    scaled: bool
    seed: int
    selected_rows: Optional[tuple] = None

    def __post_init__(self):
        a = _frozen(self.sensing_matrix)
        if a.ndim != 2:
            raise ValueError("sensing matrix must be 2-d")
        if self.mode not in MASK_MODES + ("subset",):
            raise ValueError(f"unknown ensemble mode {self.mode!r}")
        masks = tuple(self.masks)
        if masks:
            if len(masks) != a.shape[0]:
                raise ValueError("one mask per sensing-matrix row required")
            if any(mk.length != a.shape[1] for mk in masks):
                raise ValueError("mask length must match the column count")
        object.__setattr__(self, "sensing_matrix", a)
        object.__setattr__(self, "masks", masks)

    @property
    def rounds(self) -> int:
        return self.sensing_matrix.shape[0]

    @property
    def n(self) -> int:
        return self.sensing_matrix.shape[1]

    def measure(self, signal) -> np.ndarray:
        """Outcome vector ``Y^R``, one entry per round."""
        s = signal.values if isinstance(signal, SparseSignal) else np.asarray(signal, dtype=float)
        if s.shape != (self.n,):
            raise ValueError(f"signal length {s.shape} does not match ensemble width {self.n}")
        return np.array([np.dot(row, s) for row in self.sensing_matrix])


@dataclass(frozen=True)
class RecoveryResult:
    recovered_signal: np.ndarray
    output_string: np.ndarray
    residual: float
    iterations: int
    exact: Optional[bool] = None
    objective: Optional[float] = None
    config: dict = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "recovered_signal", _frozen(self.recovered_signal))
        object.__setattr__(self, "output_string", _frozen(self.output_string))
        if self.residual < 0:
            raise ValueError("residual must be nonnegative")
        if self.iterations < 0:
            raise ValueError("iterations must be nonnegative")

    def as_record(self) -> dict[str, Any]:
        rec = dict(self.config)
        rec.update(
            exact=self.exact,
            residual=float(self.residual),
            iterations=int(self.iterations),
            objective=None if self.objective is None else float(self.objective),
            recovered_signal=[float(v) for v in self.recovered_signal],
            output_string=[float(v) for v in self.output_string],
        )
        return rec


@dataclass(frozen=True)
class CurvePoint:
    rounds: int
    empirical: float
    ci: float
    theoretical: float


@dataclass(frozen=True)
class SuccessCurve:
    config: dict
    points: tuple

    def __post_init__(self):
        pts = tuple(self.points)
        rs = [p.rounds for p in pts]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("curve points must be strictly increasing in R")
        for p in pts:
            if not (0.0 <= p.empirical <= 1.0 and 0.0 <= p.theoretical <= 1.0):
                raise ValueError("probabilities must lie in [0, 1]")
        object.__setattr__(self, "points", pts)

    @property
    def rounds(self) -> np.ndarray:
        return np.array([p.rounds for p in self.points], dtype=int)

    @property
    def empirical(self) -> np.ndarray:
        return np.array([p.empirical for p in self.points])


def make_sparse_signal(n: int, K: int, value_dist: str = "gaussian", seed: int = 0) -> SparseSignal:
    """Draw a K-sparse length-n signal on a uniformly random support.

    ``value_dist`` picks the nonzero values: ``"unit"`` (+-1), ``"gaussian"``
    (standard normal) or ``"uniform"`` (uniform on [-1, 1] without 0).
    """
    if n < 1:
        raise ValueError("n must be positive")
    if K < 0 or K > n:
        raise ValueError(f"sparsity K={K} must lie in [0, n={n}]")
    if value_dist not in VALUE_DISTS:
        raise ValueError(f"unknown value distribution {value_dist!r}")
    rng = rng_from_seed(seed)
    support = np.sort(rng.choice(n, size=K, replace=False))
    if value_dist == "unit":
        vals = rng.choice([-1.0, 1.0], size=K)
    elif value_dist == "gaussian":
        vals = rng.standard_normal(K)
        while np.any(vals == 0):
            vals[vals == 0] = rng.standard_normal(int(np.sum(vals == 0)))
    else:
        vals = rng.uniform(-1.0, 1.0, size=K)
        while np.any(vals == 0):
            vals[vals == 0] = rng.uniform(-1.0, 1.0, size=int(np.sum(vals == 0)))
    x = np.zeros(n)
    x[support] = vals
    return SparseSignal(x)
