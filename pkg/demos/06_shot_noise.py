"""Measurement-shot economics: accuracy versus total circuit executions.

With S shots per compilation, one ppd iteration consumes (2P+2)*S shots
(2P for the shared gradient, one readout at the iterate, one at the
perturbed point).  Small S moves fast per shot early on but stalls away
from the optimum; larger S converges tightly at a higher shot budget.
"""

import numpy as np

from vqec import (
    AnsatzSpec,
    OptimizerConfig,
    StepSchedule,
    build_variational,
    lp_solve,
    random_instance_s1,
    run,
)

qcbo = random_instance_s1(6, 3, np.random.default_rng(0))
problem = build_variational(qcbo, "average")
reference = lp_solve(problem).value
spec = AnsatzSpec(n=6, depth=3, entanglement="full")
theta0 = np.random.default_rng(9).uniform(0, 2 * np.pi, spec.num_parameters)


def exact_readout(trace):
    # final quality is judged from the exact outcome distribution at the
    # final parameters, not from the noisy in-run estimates
    from vqec import forward, pmf

    p = pmf(forward(spec, trace.final_theta))
    f0 = problem.cost.as_vector() @ p
    f1 = problem.constraints[0].as_vector() @ p
    return abs(f1), abs((f0 - reference) / reference)


print(f"reference optimum {reference:+.4f}")
print(f"{'S':>6} {'iterations':>10} {'total shots':>12} {'|F_1| final':>12} {'rel err':>9}")
for shots in (1, 25, 50, 0):
    config = OptimizerConfig(
        method="ppd",
        mu_theta=StepSchedule.harmonic(1.5),
        mu_lambda=StepSchedule.harmonic(0.1, 15),
        nu_theta=0.05,
        nu_lambda=0.05,
        shots=shots,
        seed=11,
        max_iterations=800,
    )
    trace = run(problem, spec, config, theta0)
    f1_final, rel_final = exact_readout(trace)
    label = "exact" if shots == 0 else str(shots)
    print(f"{label:>6} {trace.iterations:>10} {trace.cum_shots[-1]:>12,} "
          f"{f1_final:>12.4f} {rel_final:>9.4f}")

print("\nan optional shot schedule grows S as iterations proceed:")
config = OptimizerConfig(
    method="ppd",
    mu_theta=StepSchedule.harmonic(1.5),
    mu_lambda=StepSchedule.harmonic(0.1, 15),
    nu_theta=0.05,
    nu_lambda=0.05,
    shots=1,
    shot_schedule=StepSchedule.geometric(1.0, 1.005),  # S_t = round(1.005**t)
    seed=11,
    max_iterations=800,
)
trace = run(problem, spec, config, theta0)
_, rel_final = exact_readout(trace)
print(f"growing S: {trace.iterations} iterations, {trace.cum_shots[-1]:,} shots, "
      f"rel err {rel_final:.4f}")
