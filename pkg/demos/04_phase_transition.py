"""
The exact-recovery phase transition
===================================

Monte Carlo success probability against the number of rounds. A small
problem keeps this quick; the acceptance suite runs n=1000, K=10.
Set DENSEMEAS_THREADS to cap the worker count.
"""
from densemeas import baseline_standard, sweep_curve

n, K = 200, 4
curve = sweep_curve(n, K, list(range(4, 61, 8)), trials=40, master_seed=7)
base = baseline_standard(100, 0.01)
print(f"n={n}, K={K}, {curve.config['trials']} trials per point")
print("   R  empirical  +-95%   closed form   standard")
for p in curve.points:
    bar = "#" * int(round(20 * p.empirical))
    print(f"{p.rounds:4d}  {p.empirical:9.2f}  {p.ci:5.2f}   {p.theoretical:11.6f}   {float(base.curve(p.rounds)):.4f}  {bar}")
