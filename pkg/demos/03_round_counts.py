"""
How many rounds do the bounds ask for?
======================================

The round-count calculators, their success probabilities and the
repeated-standard-measurement baseline side by side.
"""
import math

from densemeas import baseline_standard, log_base, rounds_theorem1, rounds_theorem2, rounds_theorem3, success_prob_theoretical

n = 1000
print("bounded-system count R = alpha Z^2 K log^4 n with Z = sqrt(n), base 10")
for K, alpha in ((2, 2.47e-4), (5, 1.36e-4), (10, 8.46e-5), (20, 6.17e-5)):
    print(f"  K={K:2d}  alpha={alpha:.2e}  R={rounds_theorem2(n, K, math.sqrt(n), alpha)}")
print("  success 1 - n^-(log n)^3 =", success_prob_theoretical("t2", n=n))

print()
print("computational-basis count R = gamma K log(10n/K), gamma = 1")
R10 = rounds_theorem3(n, 10, gamma=1)
with log_base("e"):
    Re = rounds_theorem3(n, 10, gamma=1)
print(f"  base 10: R={R10}   natural: R={Re}")
print(f"  failure 2 e^-R at R={R10}: {2 * math.exp(-R10):.3e}")

print()
print("isometry count with chi=1/3, eps=0.01, c=1 (natural log):",
      rounds_theorem1(n, 10, 1 / 3, 0.01, base="e"))

print()
b = baseline_standard(100, 0.01)
print(f"standard measurement: q={b.q:.4e} per round")
for R in (30, 100, 1000, 10000):
    print(f"  R={R:5d}  Pr(hit) = {float(b.curve(R)):.4f}")
