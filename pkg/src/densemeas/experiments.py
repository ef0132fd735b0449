"""Monte Carlo success-probability sweeps and the standard-measurement baseline.

Trial ``t`` of every point runs with seed ``mix_seed(master_seed, t)``, so the
same signal and the same leading masks are reused across the R values of a
sweep (the ensemble for a smaller R is a prefix of the one for a larger R).
Results are gathered in (R, trial) order, which keeps sweeps bit-identical
whatever the worker count.
"""
from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence

import numpy as np

from .analysis import log_base_name, success_prob_theoretical
from .model import CurvePoint, SuccessCurve, mix_seed
from .recovery import SolverError, run_procedure

THREADS_ENV = "DENSEMEAS_THREADS"
CSV_HEADER = "R,empirical,ci,theoretical"


def worker_count() -> int:
    """CPU count, capped by ``DENSEMEAS_THREADS`` when set."""
    n = os.cpu_count() or 1
    cap = os.environ.get(THREADS_ENV)
    if cap:
        n = min(n, max(1, int(cap)))
    return n


def _run_trial(kwargs) -> bool:
    try:
        return bool(run_procedure(**kwargs).exact)
    except SolverError:
        return False


def _run_jobs(jobs, workers):
    if workers <= 1 or len(jobs) < 2:
        return [_run_trial(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(_run_trial, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def _trial_kwargs(n, K, R, variant, basis, mode, seed, value_dist, scaled, masks):
    return dict(
        variant=variant, n=n, K=K, R=R, basis=basis, mode=mode, seed=seed,
        value_dist=value_dist, scaled=scaled, masks=masks,
    )


class SuccessEstimate(NamedTuple):
    p_hat: float
    ci_halfwidth: float
    flags: tuple


def _estimate(flags) -> SuccessEstimate:
    trials = len(flags)
    p = sum(flags) / trials
    return SuccessEstimate(p, 1.96 * math.sqrt(p * (1.0 - p) / trials), tuple(flags))


def success_probability(
    n: int,
    K: int,
    R: int,
    variant: str = "procedure2",
    basis: str = "identity",
    mode: str = "centered",
    trials: int = 100,
    master_seed: int = 0,
    value_dist: str = "gaussian",
    scaled: bool = False,
    masks=None,
    workers: Optional[int] = None,
) -> SuccessEstimate:
    """Fraction of exact recoveries over ``trials`` seeded runs, with a 95% half-width."""
    if trials < 1:
        raise ValueError("trials must be positive")
    jobs = [
        _trial_kwargs(n, K, R, variant, basis, mode, mix_seed(master_seed, t), value_dist, scaled, masks)
        for t in range(trials)
    ]
    return _estimate(_run_jobs(jobs, worker_count() if workers is None else workers))


def sweep_curve(
    n: int,
    K: int,
    R_list: Sequence[int],
    variant: str = "procedure2",
    basis: str = "identity",
    mode: str = "centered",
    trials: int = 100,
    master_seed: int = 0,
    value_dist: str = "gaussian",
    scaled: bool = False,
    masks_for: Optional[Callable[[int], Sequence]] = None,
    workers: Optional[int] = None,
) -> SuccessCurve:
    """Empirical and closed-form success probability at each R of ``R_list``.

    The closed form is ``1 - n^-(log n)^3`` for procedure 1 and
    ``1 - 2 exp(-R)`` for procedure 2, under the configured log base.
    ``masks_for(R)`` may return forced masks for a given R (or None).
    """
    R_list = [int(r) for r in R_list]
    if any(b <= a for a, b in zip(R_list, R_list[1:])):
        raise ValueError("R_list must be strictly increasing")
    jobs = []
    for R in R_list:
        masks = masks_for(R) if masks_for is not None else None
        for t in range(trials):
            jobs.append(_trial_kwargs(n, K, R, variant, basis, mode, mix_seed(master_seed, t), value_dist, scaled, masks))
    flags = _run_jobs(jobs, worker_count() if workers is None else workers)
    points = []
    for i, R in enumerate(R_list):
        est = _estimate(flags[i * trials:(i + 1) * trials])
        if variant == "procedure1":
            theo = success_prob_theoretical("t2", n=n) if n >= 2 else 0.0
        else:
            theo = success_prob_theoretical("t3", R=R)
        points.append(CurvePoint(R, est.p_hat, est.ci_halfwidth, theo))
    config = dict(
        n=n, K=K, variant=variant, basis=basis, mode=mode, trials=trials,
        master_seed=master_seed, value_dist=value_dist, scaled=bool(scaled),
        R_list=R_list, log_base=log_base_name(), forced_masks=masks_for is not None,
    )
    return SuccessCurve(config, tuple(points))


# -- baseline ------------------------------------------------------------------


@dataclass(frozen=True)
class BaselineReference:
    """Reference point ``(R0, p)`` of repeated standard measurement.

    The curve ``1 - (1 - q)^R`` assumes independent rounds that each hit the
    optimum with probability ``q``; it is an interpolation through the single
    reference point, not a measured curve.
    """

    R0: int
    p: float
    q: float
    label: str = "standard measurement (interpolated, independent rounds)"

    def curve(self, R) -> np.ndarray:
        R = np.asarray(R, dtype=float)
        return -np.expm1(R * math.log1p(-self.q))


def baseline_standard(R0: int = 100, p: float = 0.01) -> BaselineReference:
    """Per-round hit probability ``q`` solving ``1 - (1 - q)^R0 = p``."""
    if R0 < 1 or not 0.0 < p < 1.0:
        raise ValueError("need R0 >= 1 and p in (0, 1)")
    q = -math.expm1(math.log1p(-p) / R0)
    return BaselineReference(int(R0), float(p), q)


# -- export -------------------------------------------------------------------


def curve_to_csv(curve: SuccessCurve) -> str:
    lines = [f"# {k}: {json.dumps(v)}" for k, v in curve.config.items()]
    lines.append(CSV_HEADER)
    for p in curve.points:
        lines.append(f"{p.rounds},{p.empirical!r},{p.ci!r},{p.theoretical!r}")
    return "\n".join(lines) + "\n"


def curve_to_record(curve: SuccessCurve) -> dict:
    return dict(
        config=dict(curve.config),
        points=[dict(R=p.rounds, empirical=p.empirical, ci=p.ci, theoretical=p.theoretical) for p in curve.points],
    )


def write_curve(path, curve: SuccessCurve, fmt: str = "csv") -> None:
    if fmt == "csv":
        text = curve_to_csv(curve)
    elif fmt == "json":
        text = json.dumps(curve_to_record(curve), indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"unknown curve format {fmt!r}")
    with open(os.fspath(path), "w") as fh:
        fh.write(text)


def read_curve_csv(path) -> tuple:
    """Return ``(config, rows)`` from a curve CSV written by :func:`write_curve`."""
    config, rows = {}, []
    with open(os.fspath(path)) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(": ")
                config[key] = json.loads(val)
            elif line and line != CSV_HEADER:
                r, e, c, t = line.split(",")
                rows.append((int(r), float(e), float(c), float(t)))
    return config, rows
