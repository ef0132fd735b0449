"""Randomized Bernoulli-masked measurement rounds and their ensembles.

One round keeps or discards each computational-basis outcome of
``G = U(theta') S`` according to a fair-coin mask and aggregates the kept
values into a single scalar, ``y = <mask, U(theta') S> = <mask U(theta'), S>``.
Stacking R such rows gives the R x n sensing matrix used for recovery.
"""
from __future__ import annotations

import os
from typing import Optional, Sequence

import numpy as np

from .basis import identity_basis
from .model import (
    MASK_MODES,
    BernoulliMask,
    MeasurementEnsemble,
    OrthonormalBasis,
    SparseSignal,
    mix_seed,
    rng_from_seed,
)

SAMPLING_MODES = ("without_replacement", "with_replacement")


def gen_mask(n: int, seed: int) -> BernoulliMask:
    if n < 1:
        raise ValueError("n must be positive")
    return BernoulliMask(rng_from_seed(seed).integers(0, 2, size=n, dtype=np.int8))


def _values(signal) -> np.ndarray:
    return signal.values if isinstance(signal, SparseSignal) else np.asarray(signal, dtype=float)


def round_row(mask: BernoulliMask, U_theta_prime: OrthonormalBasis, mode: str) -> np.ndarray:
    """The measurement row ``beta'_C = beta_C U(theta')`` for one round."""
    if mode not in MASK_MODES:
        raise ValueError(f"unknown mask mode {mode!r}")
    if mask.length != U_theta_prime.dimension:
        raise ValueError(f"mask length {mask.length} != basis dimension {U_theta_prime.dimension}")
    return mask.vector(mode) @ U_theta_prime.matrix


def measure_round(mask: BernoulliMask, U_theta_prime: OrthonormalBasis, S, mode: str = "raw01") -> float:
    """Post-processed outcome of one dense measurement round."""
    s = _values(S)
    row = round_row(mask, U_theta_prime, mode)
    if s.shape != row.shape:
        raise ValueError(f"signal length {s.size} != mask length {row.size}")
    return float(np.dot(row, s))


def masked_outcomes(mask: BernoulliMask, U_theta_prime: OrthonormalBasis, S) -> np.ndarray:
    """Per-index keep/discard view: ``g_i`` where the bit is 1, else 0.

    Debug view only; recovery works with the aggregated scalar outcome.
    """
    s = _values(S)
    if s.shape != (mask.length,) or U_theta_prime.dimension != mask.length:
        raise ValueError("dimension mismatch")
    return np.where(mask.bits == 1, U_theta_prime.matrix @ s, 0.0)


def assemble_ensemble(
    R: int,
    n: int,
    U_theta_prime: Optional[OrthonormalBasis] = None,
    mode: str = "centered",
    scaled: bool = False,
    master_seed: int = 0,
    masks: Optional[Sequence[BernoulliMask]] = None,
) -> MeasurementEnsemble:
    """Draw R masks and build the sensing matrix ``Q = M U(theta')``.

    Mask ``m`` is generated from ``mix_seed(master_seed, m)``. With
    ``scaled=True`` every row is multiplied by ``1/sqrt(R)``. Passing
    ``masks`` bypasses generation (used to force degenerate ensembles).
    """
    if R < 1 or n < 1:
        raise ValueError("R and n must be positive")
    if mode not in MASK_MODES:
        raise ValueError(f"unknown mask mode {mode!r}")
    U = identity_basis(n) if U_theta_prime is None else U_theta_prime
    if U.dimension != n:
        raise ValueError(f"basis dimension {U.dimension} != n={n}")
    if masks is None:
        masks = tuple(gen_mask(n, mix_seed(master_seed, m)) for m in range(R))
    else:
        masks = tuple(masks)
        if len(masks) != R:
            raise ValueError(f"expected {R} forced masks, got {len(masks)}")
    stacked = np.stack([mk.vector(mode) for mk in masks])
    a = stacked if U.kind == "identity" else stacked @ U.matrix
    if scaled:
        a = a / np.sqrt(R)
    return MeasurementEnsemble(masks, a, mode, bool(scaled), int(master_seed))


def subset_projector_ensemble(
    R: int,
    U_full: OrthonormalBasis,
    sampling: str = "without_replacement",
    seed: int = 0,
    scaled: bool = False,
) -> MeasurementEnsemble:
    """Ensemble made of R rows of ``U_full`` chosen uniformly at random.

    ``without_replacement`` draws a uniformly random R-subset of row indices;
    ``with_replacement`` draws R indices independently. ``scaled`` multiplies
    the rows by ``sqrt(n/R)``.
    """
    n = U_full.dimension
    if sampling not in SAMPLING_MODES:
        raise ValueError(f"unknown sampling mode {sampling!r}")
    if R < 1:
        raise ValueError("R must be positive")
    if sampling == "without_replacement" and R > n:
        raise ValueError(f"cannot draw {R} distinct rows out of {n}")
    rng = rng_from_seed(seed)
    idx = rng.choice(n, size=R, replace=(sampling == "with_replacement"))
    a = U_full.matrix[idx]
    if scaled:
        a = a * np.sqrt(n / R)
    return MeasurementEnsemble((), a, "subset", bool(scaled), int(seed), selected_rows=tuple(int(i) for i in idx))


# -- text export ------------------------------------------------------------


def format_ensemble(ens: MeasurementEnsemble) -> str:
    """Header ``R n mode scaled seed`` followed by one matrix row per line.

    Entries use 17 significant digits so the matrix round-trips exactly.
    """
    lines = [f"{ens.rounds} {ens.n} {ens.mode} {str(ens.scaled).lower()} {ens.seed}"]
    for row in ens.sensing_matrix:
        lines.append(" ".join(format(float(v), ".17g") for v in row))
    return "\n".join(lines) + "\n"


def write_ensemble(path, ens: MeasurementEnsemble) -> None:
    with open(os.fspath(path), "w") as fh:
        fh.write(format_ensemble(ens))


def parse_ensemble(text: str) -> MeasurementEnsemble:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty ensemble file")
    head = lines[0].split()
    if len(head) != 5:
        raise ValueError("ensemble header must read 'R n mode scaled seed'")
    R, n = int(head[0]), int(head[1])
    mode, scaled, seed = head[2], head[3].lower() in ("true", "1"), int(head[4])
    rows = [np.array(ln.split(), dtype=float) for ln in lines[1:]]
    if len(rows) != R or any(r.size != n for r in rows):
        raise ValueError(f"expected {R} rows of {n} entries")
    a = np.vstack(rows) if rows else np.zeros((0, n))
    return MeasurementEnsemble((), a, mode, scaled, seed)


def read_ensemble(path) -> MeasurementEnsemble:
    with open(os.fspath(path)) as fh:
        return parse_ensemble(fh.read())
