"""Post-processing: basis pursuit recovery, inverse basis change, objective search.

``basis_pursuit`` solves ``min ||x||_1  s.t.  A x = y`` as the linear program

    min 1'(u + v)   s.t.   [A, -A] [u; v] = y,   u, v >= 0

with a two-phase revised simplex method. The second phase walks between
feasible vertices, and on those ``1'(u + v) = ||u - v||_1``, so the L1 norm of
the iterate never increases once phase 2 starts. The returned point is a
vertex, re-solved from the final basis for full accuracy.
"""
from __future__ import annotations

from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np
import scipy.linalg

from .basis import identity_basis, make_basis, random_orthonormal_basis, compose, coherence_bound
from .measurement import assemble_ensemble
from .model import (
    BernoulliMask,
    OrthonormalBasis,
    RecoveryResult,
    make_sparse_signal,
    mix_seed,
)

FEAS_TOL = 1e-9
OPT_TOL = 1e-9
PIVOT_TOL = 1e-9
REFACTOR_EVERY = 40


class SolverError(RuntimeError):
    pass


class InfeasibleError(SolverError):
    """The measurements admit no solution (``y`` is outside the range of ``A``)."""


class NotConvergedError(SolverError):
    """Iteration budget exhausted; carries the last iterate."""

    def __init__(self, message, x, residual, iterations):
        super().__init__(message)
        self.x = x
        self.residual = residual
        self.iterations = iterations


class BPSolution(NamedTuple):
    x: np.ndarray
    residual: float
    iterations: int


def relative_residual(A, x, y) -> float:
    y = np.asarray(y, dtype=float)
    if A.shape[0] == 0:
        return 0.0
    return float(np.linalg.norm(A @ x - y) / max(np.linalg.norm(y), 1.0))


def _independent_rows(A: np.ndarray) -> np.ndarray:
    """Indices of a maximal linearly independent subset of rows."""
    _, r, piv = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    d = np.abs(np.diag(r))
    if d.size == 0 or d[0] == 0:
        return np.zeros(0, dtype=int)
    rank = int(np.sum(d > d[0] * 1e-10))
    return np.sort(piv[:rank])


class _Simplex:
    """Revised simplex state for the split basis-pursuit LP.

    Columns ``0..n-1`` are ``+A``, ``n..2n-1`` are ``-A`` and ``2n..2n+m-1``
    are the phase-1 artificials.
    """

    def __init__(self, A, y, max_iter):
        self.A = A
        self.y = y
        self.m, self.n = A.shape
        self.max_iter = max_iter
        self.iterations = 0
        self.basis = 2 * self.n + np.arange(self.m)
        self.binv = np.eye(self.m)
        self.xb = y.copy()
        self.since_refactor = 0

    def column(self, j):
        if j < self.n:
            return self.A[:, j]
        if j < 2 * self.n:
            return -self.A[:, j - self.n]
        e = np.zeros(self.m)
        e[j - 2 * self.n] = 1.0
        return e

    def refactor(self):
        bmat = np.column_stack([self.column(j) for j in self.basis])
        self.binv = np.linalg.inv(bmat)
        self.xb = self.binv @ self.y
        self.since_refactor = 0

    def pivot(self, r, j, dirn, theta):
        self.xb -= theta * dirn
        self.xb[r] = theta
        p = dirn[r]
        self.binv[r] /= p
        e = dirn.copy()
        e[r] = 0.0
        self.binv -= np.outer(e, self.binv[r])
        self.basis[r] = j
        self.iterations += 1
        self.since_refactor += 1
        if self.since_refactor >= REFACTOR_EVERY:
            self.refactor()

    def basis_costs(self, phase):
        art = self.basis >= 2 * self.n
        return art.astype(float) if phase == 1 else (~art).astype(float)

    def objective(self, phase):
        return float(self.basis_costs(phase) @ self.xb)

    def current_x(self):
        x = np.zeros(self.n)
        for pos, j in enumerate(self.basis):
            if j < self.n:
                x[j] += self.xb[pos]
            elif j < 2 * self.n:
                x[j - self.n] -= self.xb[pos]
        return x

    def run(self, phase, trace=None):
        struct_cost = 0.0 if phase == 1 else 1.0
        while True:
            pi = self.basis_costs(phase) @ self.binv
            g = pi @ self.A
            d = np.concatenate([struct_cost - g, struct_cost + g])
            in_basis = self.basis[self.basis < 2 * self.n]
            d[in_basis] = 0.0
            j = int(np.argmin(d))
            if d[j] >= -OPT_TOL:
                return
            if self.iterations >= self.max_iter:
                raise StopIteration
            dirn = self.binv @ self.column(j)
            pos = dirn > PIVOT_TOL
            if not np.any(pos):
                raise SolverError("unbounded direction in a problem bounded below; numerical breakdown")
            idx = np.flatnonzero(pos)
            xb = np.maximum(self.xb[idx], 0.0)
            ratios = xb / dirn[idx]
            tmin = ratios.min()
            ties = idx[ratios <= tmin + 1e-12 * (1.0 + tmin)]
            r = self._lexicographic_row(ties, dirn) if ties.size > 1 else int(ties[0])
            theta = max(self.xb[r], 0.0) / dirn[r]
            self.pivot(r, j, dirn, theta)
            if trace is not None and phase == 2:
                trace.append(self.objective(phase))

    def _lexicographic_row(self, ties, dirn):
        """Break ratio-test ties by the lexicographic rule; this rules out cycling."""
        cand = ties
        for k in range(self.m):
            vals = self.binv[cand, k] / dirn[cand]
            vmin = vals.min()
            cand = cand[vals <= vmin + 1e-12 * (1.0 + abs(vmin))]
            if cand.size == 1:
                break
        return int(cand[np.argmax(dirn[cand])])

    def drive_out_artificials(self):
        for r in range(self.m):
            if self.basis[r] < 2 * self.n:
                continue
            row = self.binv[r] @ self.A
            row[self.basis[self.basis < self.n]] = 0.0
            row[self.basis[(self.basis >= self.n) & (self.basis < 2 * self.n)] - self.n] = 0.0
            j = int(np.argmax(np.abs(row)))
            if abs(row[j]) <= PIVOT_TOL:
                continue  # redundant row; the artificial stays at zero level
            dirn = self.binv @ self.column(j)
            self.pivot(r, j, dirn, self.xb[r] / dirn[r])

    def final_x(self):
        bmat = np.column_stack([self.column(j) for j in self.basis])
        self.xb = np.linalg.solve(bmat, self.y)
        return self.current_x()


def basis_pursuit(A, y, tol: float = 1e-8, max_iter: Optional[int] = None, trace: Optional[list] = None) -> BPSolution:
    """Minimum-L1 solution of ``A x = y``.

    Zero rows of ``A`` (all-zero masks) are dropped along with their outcomes,
    and linearly dependent rows are removed before the simplex starts.

    Parameters
    ----------
    A : (R, n) array
    y : (R,) array
    tol : float
        Bound on the relative residual ``||A x - y|| / max(||y||, 1)``.
    max_iter : int, optional
        Simplex pivot budget, default ``10 * n``.
    trace : list, optional
        If given, receives the L1 norm of the iterate after every phase-2
        pivot.

    Returns
    -------
    BPSolution
        ``(x, residual, iterations)``.

    Raises
    ------
    InfeasibleError
        If no ``x`` satisfies ``A x = y``.
    NotConvergedError
        If the pivot budget runs out; the exception carries the last iterate.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    y = np.asarray(y, dtype=float).reshape(-1)
    if A.ndim != 2 or A.shape[0] != y.size:
        raise ValueError(f"dimension mismatch: A is {A.shape}, y has {y.size} entries")
    R, n = A.shape
    if n < 1:
        raise ValueError("A must have at least one column")
    if max_iter is None:
        max_iter = 10 * n
    if A.shape[0] == 0 or not np.any(y):
        x = np.zeros(n)
        return BPSolution(x, relative_residual(A, x, y), 0)

    nonzero = np.any(A != 0, axis=1)
    A1, y1 = A[nonzero], y[nonzero]
    if A1.shape[0] == 0:
        raise InfeasibleError("all rows of A are zero but y is not")
    x_ls = np.linalg.lstsq(A1, y1, rcond=None)[0]
    if relative_residual(A1, x_ls, y1) > max(tol, FEAS_TOL):
        raise InfeasibleError("outcomes are inconsistent with the sensing matrix")
    rows = _independent_rows(A1)
    A2, y2 = A1[rows].copy(), y1[rows].copy()
    flip = np.where(y2 < 0, -1.0, 1.0)
    A2 *= flip[:, None]
    y2 *= flip

    lp = _Simplex(A2, y2, max_iter)
    try:
        lp.run(phase=1)
        if lp.objective(1) > FEAS_TOL * max(1.0, np.linalg.norm(y2, 1)):
            raise InfeasibleError(f"phase 1 ended with infeasibility {lp.objective(1):.3e}")
        lp.drive_out_artificials()
        if trace is not None:
            trace.append(lp.objective(2))
        lp.run(phase=2, trace=trace)
    except StopIteration:
        x = lp.current_x()
        res = relative_residual(A, x, y)
        raise NotConvergedError(
            f"basis pursuit did not converge in {max_iter} pivots", x, res, lp.iterations
        ) from None
    x = lp.final_x()
    res = relative_residual(A, x, y)
    if res > tol:
        raise SolverError(f"relative residual {res:.3e} exceeds tolerance {tol:.1e}")
    return BPSolution(x, res, lp.iterations)


def recover_output(B: OrthonormalBasis, U_theta_prime: OrthonormalBasis, S_tilde) -> np.ndarray:
    """Output string ``z = B^-1 (U(theta') S_tilde)``."""
    s = np.asarray(S_tilde, dtype=float)
    if not (B.dimension == U_theta_prime.dimension == s.size):
        raise ValueError("dimension mismatch between bases and recovered signal")
    return B.matrix.T @ (U_theta_prime.matrix @ s)


def objective_maximize(candidates: Sequence, C: Callable) -> tuple:
    """Return ``(z_star, C(z_star))`` over the per-round candidates.

    Ties go to the earliest candidate.
    """
    if len(candidates) == 0:
        raise ValueError("need at least one candidate")
    best_i, best_v = 0, C(candidates[0])
    for i in range(1, len(candidates)):
        v = C(candidates[i])
        if v > best_v:
            best_i, best_v = i, v
    return candidates[best_i], best_v


def sum_objective(z) -> float:
    return float(np.sum(z))


def distance_objective(target) -> Callable:
    t = np.asarray(target, dtype=float)
    return lambda z: -float(np.linalg.norm(np.asarray(z, dtype=float) - t))


def is_exact(S_tilde, S, rel_tol: float = 1e-6) -> bool:
    s = np.asarray(getattr(S, "values", S), dtype=float)
    err = np.max(np.abs(np.asarray(S_tilde, dtype=float) - s))
    return bool(err <= rel_tol * max(1.0, np.max(np.abs(s))))


def identity_masks(n: int) -> list:
    """Masks e_1..e_n: with raw01 rows and U(theta') = I they give A = I_n."""
    return [BernoulliMask(row) for row in np.eye(n, dtype=np.int8)]


def run_procedure(
    variant: str = "procedure2",
    n: int = 64,
    K: int = 3,
    R: int = 32,
    basis: str = "walsh",
    mode: str = "centered",
    seed: int = 0,
    C: Optional[Callable] = None,
    value_dist: str = "gaussian",
    scaled: bool = False,
    masks: Optional[Sequence[BernoulliMask]] = None,
    tol: float = 1e-8,
    max_iter: Optional[int] = None,
    return_problem: bool = False,
):
    """Run one dense-measurement procedure end to end.

    ``procedure1`` measures ``G = U(theta') S`` for a random ``U(theta')`` and
    reports ``z = B^-1 U(theta') S_tilde``; ``procedure2`` fixes
    ``U(theta') = I`` and reports ``z = S_tilde``. Child seeds are derived
    from ``seed``: index 0 for the signal, 1 for the masks, 2 for
    ``U(theta')`` and 3 for a random ``U_B``.

    With ``return_problem=True`` the result is ``(RecoveryResult, problem)``
    where ``problem`` holds the signal, ensemble, outcomes and bases.
    """
    if variant not in ("procedure1", "procedure2"):
        raise ValueError(f"unknown variant {variant!r}")
    if K > n or K < 0 or R < 0 or n < 1:
        raise ValueError("need 0 <= K <= n, R >= 0, n >= 1")
    C = sum_objective if C is None else C
    signal = make_sparse_signal(n, K, value_dist, mix_seed(seed, 0))
    U_B = make_basis(basis, n, mix_seed(seed, 3))
    U_prime = identity_basis(n) if variant == "procedure2" else random_orthonormal_basis(n, mix_seed(seed, 2))
    config = dict(
        variant=variant, n=n, K=K, R=R, basis=basis, mode=mode, seed=seed,
        value_dist=value_dist, scaled=bool(scaled), tol=tol,
        max_iter=10 * n if max_iter is None else max_iter,
    )
    if variant == "procedure1":
        config["Z"] = coherence_bound(compose(U_prime, U_B))

    ensemble = None
    if R == 0:
        y = np.zeros(0)
        sol = BPSolution(np.zeros(n), 0.0, 0)
    else:
        ensemble = assemble_ensemble(R, n, U_prime, mode, scaled, mix_seed(seed, 1), masks=masks)
        y = ensemble.measure(signal)
        sol = basis_pursuit(ensemble.sensing_matrix, y, tol=tol, max_iter=max_iter)
    z = sol.x if variant == "procedure2" else recover_output(U_B, U_prime, sol.x)
    result = RecoveryResult(
        recovered_signal=sol.x,
        output_string=z,
        residual=sol.residual,
        iterations=sol.iterations,
        exact=is_exact(sol.x, signal),
        objective=C(z),
        config=config,
    )
    if return_problem:
        problem = dict(signal=signal, ensemble=ensemble, outcomes=y, U_B=U_B, U_theta_prime=U_prime)
        return result, problem
    return result
