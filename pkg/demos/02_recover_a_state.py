"""
Recovering the state from a few rounds
======================================

Basis pursuit turns R aggregate outcomes back into the full sparse signal
once R is large enough. Below R is swept for one fixed problem.
"""

from densemeas import run_procedure

n, K = 256, 5
print(f"procedure 2, n={n}, K={K}")
for R in (10, 20, 30, 40, 60):
    res = run_procedure("procedure2", n, K, R, basis="identity", mode="centered", seed=11)
    print(f"  R={R:3d}  exact={res.exact!s:5}  pivots={res.iterations:4d}  residual={res.residual:.1e}")

# procedure 1 measures through a random unitary and maps back with B^-1 U(theta')
res, prob = run_procedure("procedure1", 64, 3, 40, basis="walsh", seed=29, return_problem=True)
print()
print("procedure 1, n=64, K=3, R=40, Walsh U_B")
print("  exact:", res.exact, " boundedness Z =", round(res.config["Z"], 3))
print("  best output objective C(z*) =", round(res.objective, 6))
