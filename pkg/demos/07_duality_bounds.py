"""Duality diagnostics and the restriction degradation bound.

Restricting the simplex LP to circuit-reachable PMFs can only raise the
optimal dual value.  If every PMF is reachable within entrywise accuracy
eps, the increase is at most eps*||f0||_1 + eps*L*||multipliers||_1, where
L is the largest constraint l1 norm and the multiplier norm is bounded
through any strictly feasible certificate PMF.
"""

import numpy as np

from vqec import (
    DiagonalObservable,
    ConstrainedProblem,
    degradation_bound,
    dual_function,
    lagrangian_value,
    lp_solve,
)

rng = np.random.default_rng(6)
N, M = 64, 2
cost = rng.standard_normal(N)
# constraints with a comfortably feasible interior so the bound applies
F = rng.standard_normal((N, M)) - 1.5

problem = ConstrainedProblem(
    n=6,
    cost=DiagonalObservable.from_vector(cost),
    constraints=tuple(DiagonalObservable.from_vector(F[:, m]) for m in range(M)),
    formulation="explicit-lp",
)
sol = lp_solve(problem)
print(f"P* = D* = {sol.value:+.6f}   multipliers {np.round(sol.multipliers, 4)}")

# weak duality: any lam >= 0 lower-bounds the optimum
for _ in range(3):
    lam = np.abs(rng.standard_normal(M))
    print(f"  D({np.round(lam, 3)}) = {dual_function(cost, F, lam):+.4f}  <=  P*")

# any PMF upper-bounds the dual function at the same multipliers
p = rng.dirichlet(np.ones(N))
lam = np.abs(rng.standard_normal(M))
print(f"  L(p; lam) = {lagrangian_value(p, lam, cost, F):+.4f}  >=  "
      f"D(lam) = {dual_function(cost, F, lam):+.4f}")

# degradation bound with the uniform PMF as the strict-feasibility certificate
p_hat = np.full(N, 1.0 / N)
slack = -(F.T @ p_hat)
print("\ncertificate slack per constraint:", np.round(slack, 4))
s0 = float(slack.min()) / 2
for eps in (0.0, 1e-4, 1e-3):
    report = degradation_bound(cost, F, eps, p_hat, s0, sol.value, sol.value)
    print(f"  eps={eps:7.0e}: restricted dual value <= {report.upper_bound:+.6f} "
          f"(multiplier-norm bound {report.multiplier_bound:.3f})")

# the certificate must clear eps*L + s0 with room to spare; an eps that is
# too large for this p_hat is rejected rather than silently accepted
try:
    degradation_bound(cost, F, 0.05, p_hat, s0, sol.value, sol.value)
except ValueError as err:
    print(f"\neps=0.05 rejected: {err}")
