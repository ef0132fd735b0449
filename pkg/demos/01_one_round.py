"""
One dense measurement round
===========================

A round draws a fair-coin mask, keeps the outcomes it selects and adds
them up into a single number. Stacking many rounds gives a linear system.
"""
import numpy as np

from densemeas import assemble_ensemble, gen_mask, identity_basis, make_sparse_signal, measure_round, walsh_hadamard_basis
from densemeas.measurement import masked_outcomes

# a 3-sparse classical representation of length 16
S = make_sparse_signal(16, 3, "unit", seed=1)
print("signal      ", S.values.astype(int))

# one mask and the per-index view of what it keeps
mask = gen_mask(16, seed=2)
print("mask        ", mask.bits)
print("kept values ", masked_outcomes(mask, identity_basis(16), S))

# the round reports only the aggregate
print("raw01 round ", measure_round(mask, identity_basis(16), S, "raw01"))
print("±1 round    ", measure_round(mask, identity_basis(16), S, "centered"))

# after a Walsh-Hadamard change of basis every index carries signal
H = walsh_hadamard_basis(16)
print("after H     ", np.round(masked_outcomes(mask, H, S), 3))

# eight rounds stacked: y = Q S
ens = assemble_ensemble(8, 16, H, "centered", scaled=False, master_seed=3)
print("Q shape     ", ens.sensing_matrix.shape)
print("outcomes    ", np.round(ens.measure(S), 3))
