"""
Restricted isometry and sub-Gaussian tails
==========================================

The exact isometry constant of small mask ensembles, the norm
concentration it rests on, and the tail behavior of the mask entries.
"""
from densemeas import assemble_ensemble, concentration_check, make_sparse_signal, rip_constant, rip_recovery_condition, subgaussian_tail_fit
from densemeas.analysis import centered_mask_source, gaussian_source

print("delta_2 of scaled ±1 ensembles, n=10")
for R in (10, 20, 40, 80):
    d = rip_constant(assemble_ensemble(R, 10, None, "centered", True, 5).sensing_matrix, 2)
    print(f"  R={R:3d}  delta_2={d:.3f}  below 1/3: {rip_recovery_condition(d)}")

print()
S = make_sparse_signal(64, 4, seed=0)
print("Pr(| ||QS||^2 - 1 | >= 0.5), n=64, K=4")
for R in (10, 20, 40, 80):
    res = concentration_check(lambda s: assemble_ensemble(R, 64, None, "centered", True, s).sensing_matrix, S, 0.5, 500)
    print(f"  R={R:3d}  tail={res.tail:.3f}")

print()
for name, src in (("mask ±1", centered_mask_source), ("gaussian", gaussian_source)):
    fit = subgaussian_tail_fit(src, [0.5, 1.0, 2.0, 3.0], 100_000)
    print(f"{name:9s} tails={[round(t, 4) for t in fit.tails]}  C2={fit.c2:.3f}")
