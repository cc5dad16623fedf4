"""Experiment runner: seeded multi-repetition studies with trace/summary output.

Three named presets mirror the benchmark setups: s1 (average-form
constrained MaxCut, n = 14, 7 specifications), s2 (same instance, coverage
form) and s3 (random 256 x 4 simplex LP).  Every run writes the instance
file, one trace CSV per repetition (plus an optional parameter sidecar) and
a summary JSON with reference values and final readouts.

Seed tree (from the master seed): spawn key (0,) draws the instance, (1,)
the initial parameters (fixed across repetitions, so repetitions probe
measurement noise around one trajectory), (2, r) the measurement streams of
repetition r.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from .ansatz import AnsatzSpec, forward
from .optimizer import IterateTrace, OptimizerConfig, StepSchedule, run
from .problems import (
    ConstrainedProblem,
    GraphInstance,
    QcboInstance,
    build_variational,
    constrained_maxcut,
    load_instance,
    maxcut_qubo,
    random_instance_s1,
    random_lp,
    save_instance,
)
from .reference import (
    BruteForceResult,
    LpSolution,
    brute_force_qcbo,
    lp_solve,
    success_probability,
)
from .sim import pmf

SETUPS = ("s1", "s2", "s3", "custom")


@dataclass
class ExperimentConfig:
    setup: str = "s1"
    instance_file: str | None = None  # custom setup input
    n: int = 14
    num_specs: int = 7
    lp_constraints: int = 3
    depth: int = 3
    entanglement: str = "full"
    repeat: int = 1
    formulation: str | None = None
    beta: float = 0.0
    shots: int = 0  # 0 = exact statevector mode
    method: str = "ppd"
    mu_theta: StepSchedule | None = None
    mu_lambda: StepSchedule | None = None
    nu_theta: float | None = None
    nu_lambda: float | None = None
    max_iterations: int = 2000
    eps_conv: float = 1e-5
    repetitions: int = 1
    seed: int = 0
    out_dir: str = "runs"
    min_iterations: int = 1
    save_thetas: bool = True

    def __post_init__(self) -> None:
        if self.setup not in SETUPS:
            raise ValueError(f"unknown setup {self.setup!r}")
        if self.repetitions < 1:
            raise ValueError("need at least one repetition")
        if self.setup == "custom" and not self.instance_file:
            raise ValueError("custom setup needs an instance file")

    def resolved(self) -> "ExperimentConfig":
        """Fill unset schedule/formulation fields with the setup's defaults."""
        cfg = replace(self)
        defaults = {
            "s1": dict(
                formulation="average",
                mu_theta=StepSchedule.harmonic(1.5),
                mu_lambda=StepSchedule.harmonic(0.1, 15),
                nu_theta=0.05,
                nu_lambda=0.05,
            ),
            "s2": dict(
                formulation="deterministic",
                mu_theta=StepSchedule.harmonic(12, 10),
                mu_lambda=StepSchedule.harmonic(4, 15),
                nu_theta=1.0,
                nu_lambda=1.5,
            ),
            "s3": dict(
                formulation="explicit-lp",
                mu_theta=StepSchedule.geometric(0.02, 0.999),
                mu_lambda=StepSchedule.geometric(0.02, 0.999),
                nu_theta=3.0,
                nu_lambda=3.0,
            ),
        }.get(cfg.setup, dict(formulation="average",
                              mu_theta=StepSchedule.harmonic(1.5),
                              mu_lambda=StepSchedule.harmonic(0.1, 15),
                              nu_theta=0.05, nu_lambda=0.05))
        for key, value in defaults.items():
            if getattr(cfg, key) is None:
                setattr(cfg, key, value)
        if cfg.setup == "s3" and cfg.n == 14:
            cfg.n = 8  # the LP preset is 2**8 = 256 dimensional
        return cfg


def _instance_rng(seed: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(0,)))


def _initial_theta(seed: int, num_params: int) -> np.ndarray:
    # one fixed draw per experiment: repetitions share the initial point and
    # differ only in their measurement streams
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(1,)))
    return rng.uniform(0.0, 2.0 * np.pi, size=num_params)


def _rep_seed(seed: int, rep: int) -> int:
    return int(np.random.SeedSequence(seed, spawn_key=(2, rep)).generate_state(1)[0])


def build_problem(cfg: ExperimentConfig) -> ConstrainedProblem:
    """Materialize the configured problem instance (deterministic in the seed)."""
    cfg = cfg.resolved()
    if cfg.setup in ("s1", "s2"):
        qcbo = random_instance_s1(cfg.n, cfg.num_specs, _instance_rng(cfg.seed))
        return build_variational(qcbo, cfg.formulation, cfg.beta)
    if cfg.setup == "s3":
        return random_lp(1 << cfg.n, cfg.lp_constraints, _instance_rng(cfg.seed))
    loaded = load_instance(cfg.instance_file)
    if isinstance(loaded, ConstrainedProblem):
        return loaded
    if isinstance(loaded, GraphInstance):
        loaded = constrained_maxcut(loaded) if loaded.C is not None else maxcut_qubo(loaded)
    if isinstance(loaded, QcboInstance):
        return build_variational(loaded, cfg.formulation or "average", cfg.beta)
    raise TypeError(f"unsupported instance payload {type(loaded).__name__}")


@dataclass
class RepetitionResult:
    rep: int
    trace: IterateTrace
    final_values: np.ndarray  # exact readout at the final parameters
    final_rel_cost_err: float | None
    final_lagrangian: float
    final_lagrangian_rel_err: float | None
    success_prob: float | None
    trace_path: str | None = None


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    problem: ConstrainedProblem
    lp: LpSolution
    brute: BruteForceResult | None
    repetitions: list[RepetitionResult]
    out_dir: Path
    summary: dict = field(default_factory=dict)


def _final_readout(
    problem: ConstrainedProblem,
    spec: AnsatzSpec,
    trace: IterateTrace,
    lp: LpSolution,
    brute: BruteForceResult | None,
    rep: int,
) -> RepetitionResult:
    """Exact statevector readout at the final parameters (shot-free metrics)."""
    p = pmf(forward(spec, trace.final_theta))
    vectors = np.stack([problem.cost.as_vector()] + [f.as_vector() for f in problem.constraints])
    vals = vectors @ p
    lag = float(vals[0] + trace.final_lambda @ vals[1:]) if trace.num_constraints else float(vals[0])
    rel = lag_rel = None
    if lp.status == "optimal" and lp.value not in (None, 0.0):
        rel = float(abs((vals[0] - lp.value) / lp.value))
        lag_rel = float(abs((lag - lp.value) / lp.value))
    succ = None
    if brute is not None and brute.feasible:
        succ = success_probability(p, brute.minimizers)
    return RepetitionResult(
        rep=rep,
        trace=trace,
        final_values=vals,
        final_rel_cost_err=rel,
        final_lagrangian=lag,
        final_lagrangian_rel_err=lag_rel,
        success_prob=succ,
    )


def run_repetition(
    problem: ConstrainedProblem,
    cfg: ExperimentConfig,
    rep: int,
    lp: LpSolution,
    brute: BruteForceResult | None,
) -> RepetitionResult:
    """One seeded optimizer run plus its exact final readout."""
    cfg = cfg.resolved()
    spec = AnsatzSpec(problem.n, cfg.depth, cfg.entanglement, cfg.repeat)
    opt = OptimizerConfig(
        method=cfg.method,
        mu_theta=cfg.mu_theta,
        mu_lambda=cfg.mu_lambda,
        nu_theta=cfg.nu_theta,
        nu_lambda=cfg.nu_lambda,
        max_iterations=cfg.max_iterations,
        eps_conv=cfg.eps_conv,
        shots=cfg.shots,
        seed=_rep_seed(cfg.seed, rep),
        min_iterations=cfg.min_iterations,
    )
    theta0 = _initial_theta(cfg.seed, spec.num_parameters)
    trace = run(problem, spec, opt, theta0)
    if lp.status == "optimal":
        trace.reference_optimum = lp.value
    return _final_readout(problem, spec, trace, lp, brute, rep)


def emit_trace(trace: IterateTrace, path: str | Path) -> Path:
    """Write the per-iteration CSV record.

    Row t pairs the multipliers entering iteration t with the observable
    values measured at the departure iterate; counters are cumulative.
    """
    path = Path(path)
    M = trace.num_constraints
    header = (
        ["iter"]
        + [f"lambda_{m + 1}" for m in range(M)]
        + [f"F_{m}" for m in range(M + 1)]
        + ["rel_cost_err", "lagrangian", "theta_change_rel", "cum_shots", "cum_compilations"]
    )
    rel = trace.rel_cost_errors()
    lag = trace.lagrangians()
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for t in range(trace.iterations):
            writer.writerow(
                [t + 1]
                + [repr(float(v)) for v in trace.lambdas[t]]
                + [repr(float(v)) for v in trace.values[t]]
                + [repr(float(rel[t])), repr(float(lag[t])), repr(float(trace.theta_change_rel[t])),
                   int(trace.cum_shots[t]), int(trace.cum_compilations[t])]
            )
    return path


def _emit_thetas(trace: IterateTrace, path: Path) -> Path:
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["iter"] + [f"theta_{p + 1}" for p in range(trace.num_parameters)])
        for t in range(trace.thetas.shape[0]):
            writer.writerow([t] + [repr(float(v)) for v in trace.thetas[t]])
    return path


def run_experiment(cfg: ExperimentConfig) -> ExperimentResult:
    """Full protocol: build, solve references, repeat, write artifacts."""
    cfg = cfg.resolved()
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    problem = build_problem(cfg)
    if problem.source is not None:
        save_instance(problem.source, out / "instance.json")
    elif problem.formulation == "explicit-lp":
        save_instance(problem, out / "instance.json")

    lp = lp_solve(problem)
    brute = brute_force_qcbo(problem.source) if problem.source is not None else None

    reps = []
    for r in range(1, cfg.repetitions + 1):
        result = run_repetition(problem, cfg, r, lp, brute)
        result.trace_path = str(emit_trace(result.trace, out / f"rep_{r:02d}_trace.csv"))
        if cfg.save_thetas:
            _emit_thetas(result.trace, out / f"rep_{r:02d}_thetas.csv")
        reps.append(result)

    success = [r.success_prob for r in reps if r.success_prob is not None]
    final_errs = [r.final_rel_cost_err for r in reps if r.final_rel_cost_err is not None]
    summary = {
        "config": _config_payload(cfg),
        "reference": {
            "lp_status": lp.status,
            "lp_value": lp.value,
            "lp_multipliers": None if lp.multipliers is None else lp.multipliers.tolist(),
            "brute_force_value": None if brute is None or not brute.feasible else brute.value,
            "minimizers": None if brute is None else brute.minimizers.tolist(),
        },
        "repetitions": [
            {
                "rep": r.rep,
                "iterations": r.trace.iterations,
                "converged_at": r.trace.converged_at,
                "final_lambda": r.trace.final_lambda.tolist(),
                "lambda_change_rel": _lambda_change_rel(r.trace),
                "final_values": r.final_values.tolist(),
                "final_rel_cost_err": r.final_rel_cost_err,
                "final_lagrangian": r.final_lagrangian,
                "final_lagrangian_rel_err": r.final_lagrangian_rel_err,
                "success_probability": r.success_prob,
                "cum_shots": int(r.trace.cum_shots[-1]),
                "cum_compilations": int(r.trace.cum_compilations[-1]),
                "trace": r.trace_path,
            }
            for r in reps
        ],
        "worst_case_success_probability": min(success) if success else None,
        "final_rel_cost_err_std": float(np.std(final_errs)) if final_errs else None,
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2))
    return ExperimentResult(cfg, problem, lp, brute, reps, out, summary)


def _lambda_change_rel(trace: IterateTrace) -> float | None:
    """Relative dual step of the last iteration: reported, never gated."""
    if trace.num_constraints == 0 or trace.lambdas.shape[0] < 2:
        return None
    prev = np.linalg.norm(trace.lambdas[-2])
    step = np.linalg.norm(trace.lambdas[-1] - trace.lambdas[-2])
    return float(step / prev) if prev > 0 else float(step)


def _config_payload(cfg: ExperimentConfig) -> dict:
    # asdict turns the StepSchedule dataclasses into plain dicts
    return asdict(cfg)
