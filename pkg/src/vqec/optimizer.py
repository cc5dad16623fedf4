"""Saddle-point iterations on the parameterized Lagrangian.

With multipliers lam >= 0 (and a fixed unit weight on the cost), the methods
iterate on L(theta; lam) = F_0(theta) + sum_m lam_m F_m(theta):

  pd:   theta' = theta - mu_t * sum_m lam_m grad F_m(theta)
        lam'_m = [lam_m + mu_l * F_m(theta)]_+

  ppd:  evaluates the updates at perturbed points obtained from one plain
        primal-dual step with constant step sizes nu_theta, nu_lambda; the
        perturbed and main primal steps share one gradient evaluation, so an
        iteration costs 2P+2 circuit parameterizations versus 2P+1 for pd.

  egm:  like ppd but re-evaluates gradients at the perturbed primal point
        (4P+2 parameterizations) and steps from the perturbed pair.

Convergence is declared on the primal iterate only, when the relative step
||theta_t - theta_{t-1}|| / ||theta_{t-1}|| drops below eps_conv (checked
from iteration 2 on).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .ansatz import AnsatzSpec
from .gradient import GradientRequest, observable_values, parameter_shift_gradient
from .problems import ConstrainedProblem

METHODS = ("pd", "ppd", "egm")


@dataclass(frozen=True)
class StepSchedule:
    """Step-size rule: constant a, harmonic a/(t+b), or geometric a*b**t."""

    kind: str
    a: float
    b: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in ("constant", "harmonic", "geometric"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.a <= 0:
            raise ValueError("schedule amplitude must be positive")
        if self.kind == "harmonic" and self.b <= -1:
            raise ValueError("harmonic offset must keep t+b positive for t >= 1")
        if self.kind == "geometric" and not 0 < self.b:
            raise ValueError("geometric ratio must be positive")

    @classmethod
    def constant(cls, value: float) -> "StepSchedule":
        return cls("constant", value)

    @classmethod
    def harmonic(cls, a: float, b: float = 0.0) -> "StepSchedule":
        return cls("harmonic", a, b)

    @classmethod
    def geometric(cls, a: float, ratio: float) -> "StepSchedule":
        return cls("geometric", a, ratio)


def step_size(sched: StepSchedule, t: int) -> float:
    """Evaluate the rule at iteration t."""
    if sched.kind == "constant":
        return sched.a
    if sched.kind == "harmonic":
        return sched.a / (t + sched.b)
    return sched.a * sched.b**t


class DivergenceError(RuntimeError):
    """Non-finite value produced mid-run; carries the offending iteration."""

    def __init__(self, iteration: int, what: str):
        super().__init__(f"non-finite {what} at iteration {iteration}")
        self.iteration = iteration


@dataclass
class OptimizerConfig:
    method: str = "ppd"
    mu_theta: StepSchedule = field(default_factory=lambda: StepSchedule.harmonic(1.5))
    mu_lambda: StepSchedule = field(default_factory=lambda: StepSchedule.harmonic(0.1, 15))
    nu_theta: float = 0.05
    nu_lambda: float = 0.05
    max_iterations: int = 2000
    eps_conv: float = 1e-5
    shots: int = 0  # 0 = exact statevector mode
    seed: int = 0
    min_iterations: int = 1  # convergence is not declared before this many steps
    shot_schedule: StepSchedule | None = None  # optional S growth rule, default off

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}")
        if self.eps_conv <= 0:
            raise ValueError("convergence tolerance must be positive")
        if self.method in ("ppd", "egm") and (self.nu_theta <= 0 or self.nu_lambda <= 0):
            raise ValueError("perturbation step sizes must be positive for ppd/egm")
        if self.shots < 0:
            raise ValueError("shot count must be >= 0")
        if self.max_iterations < 1:
            raise ValueError("need at least one iteration")

    def shots_at(self, t: int) -> int:
        if self.shot_schedule is None:
            return self.shots
        return max(1, int(round(step_size(self.shot_schedule, t))))


@dataclass
class IterateTrace:
    """Full record of one optimizer run.

    thetas/lambdas have T+1 rows (row 0 = the initial point); values row
    t-1 holds the observables measured at the iterate the step departed
    from, paired with lambdas[t-1].  Counters are cumulative after each
    iteration.
    """

    method: str
    num_parameters: int
    num_constraints: int
    shots: int
    thetas: np.ndarray
    lambdas: np.ndarray
    values: np.ndarray
    theta_change_rel: np.ndarray
    cum_shots: np.ndarray
    cum_compilations: np.ndarray
    perturbed_thetas: np.ndarray | None = None
    perturbed_lambdas: np.ndarray | None = None
    values_at_perturbed: np.ndarray | None = None
    converged_at: int | None = None
    reference_optimum: float | None = None

    @property
    def iterations(self) -> int:
        return self.values.shape[0]

    @property
    def final_theta(self) -> np.ndarray:
        return self.thetas[-1]

    @property
    def final_lambda(self) -> np.ndarray:
        return self.lambdas[-1]

    def lagrangians(self) -> np.ndarray:
        """L(theta; lam) sampled along the run from the recorded values."""
        return self.values[:, 0] + np.einsum(
            "tm,tm->t", self.lambdas[:-1], self.values[:, 1:]
        )

    def rel_cost_errors(self) -> np.ndarray:
        """|(F_0 - P*)/P*| per iteration; NaN when no reference is attached."""
        if self.reference_optimum is None or self.reference_optimum == 0:
            return np.full(self.iterations, np.nan)
        return np.abs((self.values[:, 0] - self.reference_optimum) / self.reference_optimum)


def _lagrangian_weights(lam: np.ndarray) -> np.ndarray:
    # fixed unit weight on the cost row, multipliers on the rest
    return np.concatenate(([1.0], lam))


def perturbed_pair(
    theta: np.ndarray,
    lam: np.ndarray,
    gradients: np.ndarray,
    values_at_theta: np.ndarray,
    nu_theta: float,
    nu_lambda: float,
) -> tuple[np.ndarray, np.ndarray]:
    """One plain primal-dual step with constant steps: the perturbation point."""
    theta_tilde = theta - nu_theta * (_lagrangian_weights(lam) @ gradients)
    lam_tilde = np.maximum(lam + nu_lambda * values_at_theta[1:], 0.0)
    return theta_tilde, lam_tilde


def pd_step(
    theta: np.ndarray,
    lam: np.ndarray,
    gradients: np.ndarray,
    values: np.ndarray,
    schedules: tuple[StepSchedule, StepSchedule],
    t: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Plain primal-dual update at (theta, lam)."""
    mu_t = step_size(schedules[0], t)
    mu_l = step_size(schedules[1], t)
    theta_next = theta - mu_t * (_lagrangian_weights(lam) @ gradients)
    lam_next = np.maximum(lam + mu_l * values[1:], 0.0)
    return theta_next, lam_next


def ppd_step(
    theta: np.ndarray,
    lam: np.ndarray,
    gradients: np.ndarray,
    values_at_theta: np.ndarray,
    values_at_perturbed: np.ndarray,
    schedules: tuple[StepSchedule, StepSchedule],
    t: int,
    nu_theta: float,
    nu_lambda: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Perturbed primal-dual update; main and perturbed primal steps share gradients.

    Returns (theta', lam', theta_tilde, lam_tilde).
    """
    theta_tilde, lam_tilde = perturbed_pair(theta, lam, gradients, values_at_theta, nu_theta, nu_lambda)
    mu_t = step_size(schedules[0], t)
    mu_l = step_size(schedules[1], t)
    theta_next = theta - mu_t * (_lagrangian_weights(lam_tilde) @ gradients)
    lam_next = np.maximum(lam + mu_l * values_at_perturbed[1:], 0.0)
    return theta_next, lam_next, theta_tilde, lam_tilde


def egm_step(
    theta: np.ndarray,
    lam: np.ndarray,
    gradients_at_theta: np.ndarray,
    gradients_at_perturbed: np.ndarray,
    values_at_theta: np.ndarray,
    values_at_perturbed: np.ndarray,
    schedules: tuple[StepSchedule, StepSchedule],
    t: int,
    nu_theta: float,
    nu_lambda: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Extragradient update: step from the perturbed pair with its own gradients."""
    theta_tilde, lam_tilde = perturbed_pair(
        theta, lam, gradients_at_theta, values_at_theta, nu_theta, nu_lambda
    )
    mu_t = step_size(schedules[0], t)
    mu_l = step_size(schedules[1], t)
    theta_next = theta_tilde - mu_t * (_lagrangian_weights(lam_tilde) @ gradients_at_perturbed)
    lam_next = np.maximum(lam_tilde + mu_l * values_at_perturbed[1:], 0.0)
    return theta_next, lam_next, theta_tilde, lam_tilde


def run(
    problem: ConstrainedProblem,
    spec: AnsatzSpec,
    config: OptimizerConfig,
    theta0: np.ndarray,
) -> IterateTrace:
    """Iterate the configured method from theta0 (multipliers start at zero).

    Deterministic given config.seed: every shot-mode sample stream is derived
    from (seed, iteration, evaluation kind, parameter index).
    """
    theta0 = np.asarray(theta0, dtype=np.float64)
    if theta0.shape != (spec.num_parameters,):
        raise ValueError("initial parameters do not match the ansatz")
    observables = (problem.cost, *problem.constraints)
    M = len(problem.constraints)
    P = spec.num_parameters
    schedules = (config.mu_theta, config.mu_lambda)
    perturbed = config.method in ("ppd", "egm")

    thetas = [theta0]
    lambdas = [np.zeros(M)]
    values_rows: list[np.ndarray] = []
    tilde_thetas: list[np.ndarray] = []
    tilde_lambdas: list[np.ndarray] = []
    tilde_values: list[np.ndarray] = []
    rel_changes: list[float] = []
    cum_shots: list[int] = []
    cum_comps: list[int] = []
    shots_total = 0
    comps_total = 0
    converged_at: int | None = None

    theta = theta0
    lam = np.zeros(M)
    for t in range(1, config.max_iterations + 1):
        shots_t = config.shots_at(t)
        base = dict(
            spec=spec, observables=observables, shots=shots_t, seed=config.seed, iteration=t
        )
        vals = observable_values(GradientRequest(theta=theta, sample_tag=0, **base)).values
        if not np.all(np.isfinite(vals)):
            raise DivergenceError(t, "observable values")

        mask = None
        if shots_t > 0 and M > 0:
            # measuring grad F_m is pointless when its multiplier weight is
            # zero in both primal steps of the iteration
            if perturbed:
                lam_tilde_preview = np.maximum(lam + config.nu_lambda * vals[1:], 0.0)
                inactive = (lam == 0.0) & (lam_tilde_preview == 0.0)
            else:
                inactive = lam == 0.0
            mask = np.concatenate(([True], ~inactive))
        grad = parameter_shift_gradient(
            GradientRequest(theta=theta, sample_tag=0, active=mask, **base)
        ).matrix

        if config.method == "pd":
            theta_next, lam_next = pd_step(theta, lam, grad, vals, schedules, t)
            comps_total += 2 * P + 1
            shots_total += (2 * P + 1) * shots_t
        else:
            theta_tilde, lam_tilde = perturbed_pair(
                theta, lam, grad, vals, config.nu_theta, config.nu_lambda
            )
            vals_tilde = observable_values(
                GradientRequest(theta=theta_tilde, sample_tag=1, **base)
            ).values
            if config.method == "ppd":
                theta_next, lam_next, theta_tilde, lam_tilde = ppd_step(
                    theta, lam, grad, vals, vals_tilde, schedules, t,
                    config.nu_theta, config.nu_lambda,
                )
                comps_total += 2 * P + 2
                shots_total += (2 * P + 2) * shots_t
            else:
                grad_tilde = parameter_shift_gradient(
                    GradientRequest(theta=theta_tilde, sample_tag=1, active=mask, **base)
                ).matrix
                theta_next, lam_next, theta_tilde, lam_tilde = egm_step(
                    theta, lam, grad, grad_tilde, vals, vals_tilde, schedules, t,
                    config.nu_theta, config.nu_lambda,
                )
                comps_total += 4 * P + 2
                shots_total += (4 * P + 2) * shots_t
            tilde_thetas.append(theta_tilde)
            tilde_lambdas.append(lam_tilde)
            tilde_values.append(vals_tilde)

        if not (np.all(np.isfinite(theta_next)) and np.all(np.isfinite(lam_next))):
            raise DivergenceError(t, "iterates")

        denom = np.linalg.norm(theta)
        rel = float(np.linalg.norm(theta_next - theta) / denom) if denom > 0 else np.inf
        values_rows.append(vals)
        rel_changes.append(rel)
        cum_shots.append(shots_total)
        cum_comps.append(comps_total)
        thetas.append(theta_next)
        lambdas.append(lam_next)
        theta = theta_next
        lam = lam_next

        if t >= 2 and t >= config.min_iterations and rel <= config.eps_conv:
            converged_at = t
            break

    return IterateTrace(
        method=config.method,
        num_parameters=P,
        num_constraints=M,
        shots=config.shots,
        thetas=np.asarray(thetas),
        lambdas=np.asarray(lambdas),
        values=np.asarray(values_rows),
        theta_change_rel=np.asarray(rel_changes),
        cum_shots=np.asarray(cum_shots, dtype=np.int64),
        cum_compilations=np.asarray(cum_comps, dtype=np.int64),
        perturbed_thetas=np.asarray(tilde_thetas) if tilde_thetas else None,
        perturbed_lambdas=np.asarray(tilde_lambdas) if tilde_lambdas else None,
        values_at_perturbed=np.asarray(tilde_values) if tilde_values else None,
        converged_at=converged_at,
    )
