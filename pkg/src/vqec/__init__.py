"""Constrained variational quantum optimization lab.

A dense statevector simulator, a two-local RY/CZ ansatz with exact
corner-state preparation, diagonal observables, shift-rule gradients,
primal-dual saddle-point methods (plain, perturbed, extragradient), problem
encodings (QUBO, constrained MaxCut, average/coverage/chance forms, simplex
LPs) and exact classical references (brute force, dense simplex, duality
bounds).
"""

from .ansatz import AnsatzSpec, corner_params, entanglement_pairs, forward
from .experiments import ExperimentConfig, run_experiment
from .gradient import GradientRequest, observable_values, parameter_shift_gradient
from .observables import (
    DiagonalObservable,
    QuadraticForm,
    chance_transform,
    eval_quadratic,
    exact_expectation,
    indicator_transform,
    shot_estimate,
    shot_estimate_all,
    tabulate,
)
from .optimizer import (
    DivergenceError,
    IterateTrace,
    OptimizerConfig,
    StepSchedule,
    egm_step,
    pd_step,
    ppd_step,
    run,
    step_size,
)
from .problems import (
    ConstrainedProblem,
    GraphInstance,
    QcboInstance,
    balance_constraints,
    build_variational,
    constrained_maxcut,
    cut_size,
    load_instance,
    maxcut_qubo,
    random_instance_s1,
    random_lp,
    save_instance,
)
from .reference import (
    BoundReport,
    BruteForceResult,
    LpSolution,
    brute_force_qcbo,
    degradation_bound,
    dual_function,
    lagrangian_value,
    lp_solve,
    success_probability,
)
from .sim import (
    Statevector,
    apply_cz,
    apply_ry,
    bits_to_index,
    index_to_bits,
    pmf,
    sample_bitstrings,
    zero_state,
)

__version__ = "0.1.0"
