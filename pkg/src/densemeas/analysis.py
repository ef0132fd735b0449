"""Restricted isometry, concentration checks and round-count calculators."""
from __future__ import annotations

import contextlib
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .measurement import gen_mask
from .model import SparseSignal, mix_seed, rng_from_seed

RIP_SUBSET_LIMIT = 10**6
_RIP_CHUNK = 4096

# -- logarithm base ----------------------------------------------------------

_LOG_BASE = 10.0


def _parse_base(base) -> float:
    if isinstance(base, str):
        if base.lower() in ("e", "ln", "natural"):
            return math.e
        base = float(base)
    base = float(base)
    if not base > 1.0:
        raise ValueError(f"logarithm base must exceed 1, got {base}")
    return base


def get_log_base() -> float:
    return _LOG_BASE


def set_log_base(base) -> None:
    """Set the base used by every calculator (10 by default, ``"e"`` for natural)."""
    global _LOG_BASE
    _LOG_BASE = _parse_base(base)


@contextlib.contextmanager
def log_base(base):
    """Temporarily switch the calculator log base."""
    prev = get_log_base()
    set_log_base(base)
    try:
        yield
    finally:
        set_log_base(prev)


def log_base_name(base=None) -> str:
    b = _LOG_BASE if base is None else _parse_base(base)
    return "e" if b == math.e else format(b, "g")


def _log(x: float, base=None) -> float:
    b = _LOG_BASE if base is None else _parse_base(base)
    if b == 10.0:
        return math.log10(x)
    if b == math.e:
        return math.log(x)
    if b == 2.0:
        return math.log2(x)
    return math.log(x) / math.log(b)


def _ceil(x: float) -> int:
    # values within float noise of an integer are not bumped to the next one
    r = round(x)
    if abs(x - r) <= 1e-12 * max(1.0, abs(x)):
        return int(r)
    return int(math.ceil(x))


def _check_open_unit(name, v):
    if not 0.0 < v < 1.0:
        raise ValueError(f"{name} must lie in (0, 1), got {v}")


# -- restricted isometry -------------------------------------------------------


class CombinatorialLimitError(ValueError):
    def __init__(self, count):
        super().__init__(f"{count} supports to enumerate exceeds the limit of {RIP_SUBSET_LIMIT}")
        self.count = count


def _support_chunks(n, K):
    it = itertools.combinations(range(n), K)
    while True:
        chunk = list(itertools.islice(it, _RIP_CHUNK))
        if not chunk:
            return
        yield np.array(chunk, dtype=int)


def rip_constant(A, K: int, return_support: bool = False):
    """Exact K-th restricted isometry constant by enumerating all K-subsets.

    For every support T the spectral norm of ``A_T' A_T - I`` is obtained from
    the eigenvalues of the Gram submatrix; the constant is the maximum.
    """
    A = np.asarray(A, dtype=float)
    n = A.shape[1]
    if not 1 <= K <= n:
        raise ValueError(f"K must lie in [1, {n}]")
    count = math.comb(n, K)
    if count > RIP_SUBSET_LIMIT:
        raise CombinatorialLimitError(count)
    gram = A.T @ A
    best, best_T = -1.0, None
    for T in _support_chunks(n, K):
        sub = gram[T[:, :, None], T[:, None, :]]
        ev = np.linalg.eigvalsh(sub)
        dev = np.maximum(np.abs(ev[:, -1] - 1.0), np.abs(1.0 - ev[:, 0]))
        i = int(np.argmax(dev))
        if dev[i] > best:
            best, best_T = float(dev[i]), tuple(int(t) for t in T[i])
    return (best, best_T) if return_support else best


def rip_recovery_condition(delta_2k: float) -> bool:
    """True when ``delta_2K < 1/3`` (strict), the uniqueness condition for L1 recovery."""
    if delta_2k < 0:
        raise ValueError("restricted isometry constants are nonnegative")
    return bool(delta_2k < 1.0 / 3.0)


# -- concentration -----------------------------------------------------------


@dataclass(frozen=True)
class ConcentrationResult:
    tail: float
    c_hat: Optional[float]
    kappa: float
    rounds: int
    trials: int


def concentration_check(ensemble_factory: Callable[[int], np.ndarray], S, kappa: float, trials: int, seed: int = 0) -> ConcentrationResult:
    """Empirical ``Pr(| ||Q S||^2 - ||S||^2 | >= kappa ||S||^2)``.

    ``ensemble_factory(seed)`` returns a scaled R x n matrix; trial ``t`` uses
    seed ``mix_seed(seed, t)``. ``S`` is normalized first. When the tail is
    positive the fitted exponent ``c_hat = -ln(p/2) / (kappa^2 R)`` is
    reported as well.
    """
    _check_open_unit("kappa", kappa)
    if trials < 100:
        raise ValueError("use at least 100 trials")
    s = S.normalized().values if isinstance(S, SparseSignal) else np.asarray(S, float) / np.linalg.norm(S)
    hits, R = 0, None
    for t in range(trials):
        Q = np.asarray(ensemble_factory(mix_seed(seed, t)), dtype=float)
        R = Q.shape[0]
        dev = abs(float(np.dot(Q @ s, Q @ s)) - 1.0)
        hits += dev >= kappa
    p = hits / trials
    c_hat = -math.log(p / 2.0) / (kappa**2 * R) if p > 0 else None
    return ConcentrationResult(p, c_hat, kappa, R, trials)


@dataclass(frozen=True)
class SubgaussianFit:
    kappas: tuple
    tails: tuple
    c1: float
    c2: float
    satisfied: bool


def subgaussian_tail_fit(sample_source: Callable[[int, int], np.ndarray], kappa_grid: Sequence[float], trials: int, seed: int = 0) -> SubgaussianFit:
    """Fit ``Pr(|X| >= kappa) <= C1 exp(-C2 kappa^2)`` at ``C1 = 2``.

    ``sample_source(seed, size)`` returns ``size`` scalar draws. ``c2`` is the
    largest constant for which the bound holds at every grid point (infinite
    when every empirical tail is zero); ``satisfied`` says whether a positive
    constant exists.
    """
    grid = np.asarray(kappa_grid, dtype=float)
    if grid.size == 0 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ValueError("kappa grid must be nonempty, positive and increasing")
    x = np.abs(np.asarray(sample_source(seed, trials), dtype=float))
    tails = np.array([np.mean(x >= k) for k in grid])
    with np.errstate(divide="ignore"):
        bounds = np.where(tails > 0, -np.log(tails / 2.0) / grid**2, np.inf)
    c2 = float(np.min(bounds))
    return SubgaussianFit(tuple(grid.tolist()), tuple(tails.tolist()), 2.0, c2, bool(c2 > 0))


def rademacher_source(seed: int, size: int) -> np.ndarray:
    return rng_from_seed(seed).choice([-1.0, 1.0], size=size)


def gaussian_source(seed: int, size: int) -> np.ndarray:
    return rng_from_seed(seed).standard_normal(size)


def centered_mask_source(seed: int, size: int) -> np.ndarray:
    """Centered (+-1) view of fair mask bits."""
    return gen_mask(size, seed).centered_view


# -- round counts and success probabilities ----------------------------------


def rounds_theorem1(n: int, K: int, chi: float, eps: float, c: float = 1.0, base=None) -> int:
    """Rounds for ``Pr(delta_K < chi) >= 1 - eps``:

    ``R = 2/(3c) / chi^2 * (K (9 + 2 log(n/K)) + 2 log(2/eps))``.
    """
    _check_open_unit("chi", chi)
    _check_open_unit("eps", eps)
    if c <= 0 or n < 1 or not 0 <= K <= n:
        raise ValueError("need c > 0, n >= 1 and 0 <= K <= n")
    k_term = K * (9.0 + 2.0 * _log(n / K, base)) if K > 0 else 0.0
    return _ceil(2.0 / (3.0 * c) / chi**2 * (k_term + 2.0 * _log(2.0 / eps, base)))


def rounds_theorem2(n: int, K: int, Z: float, alpha: float, base=None) -> int:
    """``R = alpha Z^2 K log^4(n)``, rounded up."""
    if Z < 1 or alpha <= 0 or n < 1 or K < 0:
        raise ValueError("need Z >= 1, alpha > 0, n >= 1, K >= 0")
    return _ceil(alpha * Z**2 * K * _log(n, base) ** 4)


def rounds_theorem3(n: int, K: int, mode: str = "gamma_form", xi: Optional[float] = None, gamma: Optional[float] = None, c1: float = 1.0, c2: float = 1.0, base=None) -> int:
    """Rounds for computational-basis outputs.

    ``xi_form``: ``R = c1 K log(10n/K) + c2 log(2/xi)``;
    ``gamma_form``: ``R = gamma K log(10n/K)``.
    """
    if n < 1 or not 0 <= K <= n:
        raise ValueError("need n >= 1 and 0 <= K <= n")
    k_log = K * _log(10.0 * n / K, base) if K > 0 else 0.0
    if mode == "xi_form":
        if xi is None:
            raise ValueError("xi_form needs xi")
        _check_open_unit("xi", xi)
        if c1 <= 0 or c2 <= 0:
            raise ValueError("c1 and c2 must be positive")
        return _ceil(c1 * k_log + c2 * _log(2.0 / xi, base))
    if mode == "gamma_form":
        if gamma is None or gamma <= 0:
            raise ValueError("gamma_form needs gamma > 0")
        return _ceil(gamma * k_log)
    raise ValueError(f"unknown mode {mode!r}")


def failure_prob_theoretical(theorem: str, n: Optional[int] = None, R: Optional[int] = None, base=None) -> float:
    """Closed-form error probability: ``n^-(log n)^3`` (t2) or ``2 exp(-R)`` (t3)."""
    if theorem == "t2":
        if n is None or n < 2:
            raise ValueError("t2 needs n >= 2")
        lg = _log(n, base)
        return min(1.0, math.exp(-math.log(n) * lg**3))
    if theorem == "t3":
        if R is None or R < 0:
            raise ValueError("t3 needs R >= 0")
        return min(1.0, 2.0 * math.exp(-R))
    raise ValueError(f"unknown theorem {theorem!r}")


def success_prob_theoretical(theorem: str, n: Optional[int] = None, R: Optional[int] = None, base=None) -> float:
    """``1 - n^-(log n)^3`` for t2, ``1 - 2 exp(-R)`` for t3, clamped to [0, 1]."""
    return max(0.0, 1.0 - failure_prob_theoretical(theorem, n=n, R=R, base=base))
