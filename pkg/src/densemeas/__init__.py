"""Dense quantum measurement: Bernoulli-masked rounds plus L1 recovery."""
from .analysis import (
    CombinatorialLimitError,
    concentration_check,
    failure_prob_theoretical,
    get_log_base,
    log_base,
    rip_constant,
    rip_recovery_condition,
    rounds_theorem1,
    rounds_theorem2,
    rounds_theorem3,
    set_log_base,
    subgaussian_tail_fit,
    success_prob_theoretical,
)
from .basis import compose, dct_basis, identity_basis, make_basis, random_orthonormal_basis, walsh_hadamard_basis
from .experiments import baseline_standard, success_probability, sweep_curve, write_curve
from .measurement import (
    assemble_ensemble,
    gen_mask,
    measure_round,
    read_ensemble,
    subset_projector_ensemble,
    write_ensemble,
)
from .model import (
    BernoulliMask,
    MeasurementEnsemble,
    OrthonormalBasis,
    RecoveryResult,
    SparseSignal,
    SuccessCurve,
    make_sparse_signal,
    mix_seed,
)
from .recovery import SolverError, basis_pursuit, objective_maximize, recover_output, run_procedure

__version__ = "0.1.0"
