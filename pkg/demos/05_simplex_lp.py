"""Large-scale linear programs over the probability simplex.

The value vectors need not come from any binary function: a random
N x (M+1) matrix of standard normals defines a cost column and M constraint
columns directly.  The exact solver is a revised primal simplex whose basis
has only M+1 columns, so N can be large; the variational route parameterizes
the N-dimensional PMF with just depth*n circuit angles.
"""

import numpy as np

from vqec import (
    AnsatzSpec,
    OptimizerConfig,
    StepSchedule,
    dual_function,
    lp_solve,
    random_lp,
    run,
)

# N = 256 outcomes, 3 constraints (a 256 x 4 value matrix).
problem = random_lp(256, 3, np.random.default_rng(1))
cost = problem.cost.as_vector()
F = problem.constraint_matrix()

sol = lp_solve(problem)
print(f"exact optimum {sol.value:+.6f}")
print("multipliers:", np.round(sol.multipliers, 4))
print("support size of the optimal PMF:", int(np.sum(sol.p > 1e-12)))
print("strong duality gap:",
      f"{abs(dual_function(cost, F, sol.multipliers) - sol.value):.2e}")

# Variational solve with finite measurement shots (stochastic updates).
spec = AnsatzSpec(n=8, depth=3, entanglement="full")
config = OptimizerConfig(
    method="ppd",
    mu_theta=StepSchedule.geometric(0.02, 0.999),
    mu_lambda=StepSchedule.geometric(0.02, 0.999),
    nu_theta=3.0,
    nu_lambda=3.0,
    shots=150,
    seed=0,
    max_iterations=1500,
)
theta0 = np.random.default_rng(3).uniform(0, 2 * np.pi, spec.num_parameters)
trace = run(problem, spec, config, theta0)
trace.reference_optimum = sol.value

print(f"\nvariational run: {trace.iterations} iterations, "
      f"{trace.cum_shots[-1]:,} total shots")
print("final constraint values:", np.round(trace.values[-1, 1:], 4))
print(f"final relative cost error: {trace.rel_cost_errors()[-1]:.3f}")
print("final multipliers:", np.round(trace.final_lambda, 4),
      " (exact:", np.round(sol.multipliers, 4), ")")
