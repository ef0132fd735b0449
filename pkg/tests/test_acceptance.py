"""Acceptance criteria 1-7.

Each criterion is a function returning ``(passed, detail)``. The pytest
wrappers assert on it, and a one-line verdict per criterion is printed in the
terminal summary (or directly when this file is run as a script).
"""
import functools
import math

import numpy as np

import oracles
from densemeas.analysis import concentration_check, rip_constant, rip_recovery_condition, rounds_theorem2, rounds_theorem3, success_prob_theoretical
from densemeas.experiments import curve_to_csv, sweep_curve
from densemeas.measurement import assemble_ensemble, format_ensemble
from densemeas.model import make_sparse_signal, mix_seed
from densemeas.recovery import basis_pursuit, is_exact

RESULTS = {}

SWEEP = dict(n=1000, K=10, R_list=list(range(10, 151, 10)), variant="procedure2", mode="centered", trials=100, master_seed=7)


def _record(num, ok, detail):
    RESULTS[num] = (ok, detail)
    return ok, detail


@functools.lru_cache(maxsize=1)
def _sweep():
    return sweep_curve(**SWEEP)


def _two_sigma(p_a, p_b, trials):
    return 2 * math.sqrt((p_a * (1 - p_a) + p_b * (1 - p_b)) / trials)


def criterion_1():
    curve = _sweep()
    R = curve.rounds.tolist()
    p = curve.empirical.tolist()
    monotone = all(b >= a - _two_sigma(a, b, SWEEP["trials"]) for a, b in zip(p, p[1:]))
    cross = next((r for r, v in zip(R, p) if v >= 0.95), None)
    calc10 = rounds_theorem3(1000, 10, gamma=1, base=10)
    calce = rounds_theorem3(1000, 10, gamma=1, base="e")
    ok = monotone and cross is not None
    detail = f"monotone(2-sigma)={monotone} crossing R={cross} (calculator: base-10 {calc10}, natural {calce})"
    return _record(1, ok, detail)


def criterion_2():
    expected = {2: 41, 5: 56, 10: 69, 20: 100}
    alphas = {2: 2.47e-4, 5: 1.36e-4, 10: 8.46e-5, 20: 6.17e-5}
    got = {K: rounds_theorem2(1000, K, math.sqrt(1000), a, base=10) for K, a in alphas.items()}
    exact = {K: math.ceil(oracles.theorem2_raw(repr(a), 1000, K, 1000, 3)) for K, a in alphas.items()}
    ok = got == expected == exact
    return _record(2, ok, f"R={[got[K] for K in sorted(got)]}")


def criterion_3():
    worst, dominated = 0.0, True
    for i in range(20):
        n, R, K = 8 + i % 5, 6 + i % 5, 1 + i % 3
        A = assemble_ensemble(R, n, None, "centered", True, mix_seed(3, i)).sensing_matrix
        d = rip_constant(A, K)
        worst = max(worst, abs(d - oracles.rip_eigh_loop(A, K)))
        dominated &= d >= oracles.rip_random_probe(A, K, 100_000, seed=i) - 1e-12
    ok = worst <= 1e-10 and dominated
    return _record(3, ok, f"max |delta - oracle|={worst:.2e}, dominates probe bound: {dominated}")


def criterion_4():
    n, qualifying, failures = 10, 0, 0
    for R in (40, 60):
        for s in range(100):
            A = assemble_ensemble(R, n, None, "centered", True, mix_seed(R, s)).sensing_matrix
            if not rip_recovery_condition(rip_constant(A, 2)):
                continue
            qualifying += 1
            for i in range(n):
                for sign in (1.0, -1.0):
                    S = np.zeros(n)
                    S[i] = sign
                    if not is_exact(basis_pursuit(A, A @ S).x, S):
                        failures += 1
    ok = failures == 0 and qualifying > 0
    return _record(4, ok, f"{qualifying} ensembles with delta_2 < 1/3, {failures} recovery failures")


def criterion_5():
    disagreements, certified, total = 0, 0, 0
    for n in range(3, 13):
        R = max(2, n // 2 + 1)
        for K in (1, 2):
            for i in range(50):
                seed = mix_seed(1000 * n + K, i)
                A = assemble_ensemble(R, n, None, "centered", False, seed).sensing_matrix
                y = A @ make_sparse_signal(n, K, "gaussian", seed).values
                total += 1
                xo, unique = oracles.bp_vertex_oracle(A, y)
                if not unique:
                    continue
                certified += 1
                if np.max(np.abs(basis_pursuit(A, y).x - xo)) > 1e-6:
                    disagreements += 1
    ok = disagreements == 0 and certified > 0
    return _record(5, ok, f"{certified}/{total} instances certified unique, {disagreements} disagreements")


@functools.lru_cache(maxsize=1)
def _tails():
    S = make_sparse_signal(64, 4, "gaussian", 6)
    out = []
    for R in range(20, 81, 10):
        res = concentration_check(lambda s, R=R: assemble_ensemble(R, 64, None, "centered", True, s).sensing_matrix, S, 0.5, 2000, seed=R)
        out.append((R, res.tail))
    return tuple(out)


def criterion_6():
    tails = _tails()
    p = [t for _, t in tails]
    monotone = all(b <= a + _two_sigma(a, b, 2000) for a, b in zip(p, p[1:]))
    refs = [
        (success_prob_theoretical("t3", R=30), oracles.success_t3(30)),
        (success_prob_theoretical("t3", R=1), oracles.success_t3(1)),
        (success_prob_theoretical("t2", n=1000, base=10), oracles.success_t2_base10(1000)),
        (2 * math.exp(-30), 2 * oracles.mpmath.exp(-30)),
    ]
    closed = all(abs(a - float(b)) <= 1e-12 * abs(float(b)) for a, b in refs)
    ok = monotone and closed
    return _record(6, ok, f"tails R=20..80: {[round(t, 4) for t in p]}, closed forms ok: {closed}")


def criterion_7():
    first = curve_to_csv(_sweep())
    again = curve_to_csv(sweep_curve(**SWEEP))
    ens_a = format_ensemble(assemble_ensemble(10, 12, None, "centered", True, mix_seed(3, 4)))
    ens_b = format_ensemble(assemble_ensemble(10, 12, None, "centered", True, mix_seed(3, 4)))
    ok = first.encode() == again.encode() and ens_a == ens_b
    return _record(7, ok, "curve CSV and ensemble exports byte-identical on repeat" if ok else "exports differ")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


def test_criterion_1_phase_transition():
    ok, detail = criterion_1()
    assert ok, detail


def test_criterion_2_caption_constants():
    ok, detail = criterion_2()
    assert ok, detail


def test_criterion_3_rip_oracle():
    ok, detail = criterion_3()
    assert ok, detail


def test_criterion_4_rip_condition_recovery():
    ok, detail = criterion_4()
    assert ok, detail


def test_criterion_5_solver_vs_enumeration():
    ok, detail = criterion_5()
    assert ok, detail


def test_criterion_6_concentration():
    ok, detail = criterion_6()
    assert ok, detail


def test_criterion_7_determinism():
    ok, detail = criterion_7()
    assert ok, detail


def summary_lines():
    return [f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}" for k, (ok, detail) in sorted(RESULTS.items())]


if __name__ == "__main__":
    for fn in CRITERIA:
        fn()
    print("\n".join(summary_lines()))
