import numpy as np
import pytest

import vqec.optimizer as optimizer_mod
from vqec.ansatz import AnsatzSpec, corner_params
from vqec.observables import DiagonalObservable
from vqec.optimizer import (
    DivergenceError,
    OptimizerConfig,
    StepSchedule,
    egm_step,
    pd_step,
    ppd_step,
    run,
    step_size,
)
from vqec.problems import ConstrainedProblem, build_variational, random_instance_s1
from vqec.reference import brute_force_qcbo, dual_function, lp_solve


def lp_problem(cost, columns):
    n = (len(cost)).bit_length() - 1
    return ConstrainedProblem(
        n=n,
        cost=DiagonalObservable.from_vector(np.asarray(cost, float)),
        constraints=tuple(DiagonalObservable.from_vector(np.asarray(c, float)) for c in columns),
        formulation="explicit-lp",
    )


class TestStepSchedule:
    def test_harmonic(self):
        assert step_size(StepSchedule.harmonic(1.5), 3) == 0.5
        assert step_size(StepSchedule.harmonic(0.1, 15), 1) == 0.00625

    def test_geometric(self):
        assert step_size(StepSchedule.geometric(0.02, 0.999), 0) == 0.02
        assert abs(step_size(StepSchedule.geometric(0.02, 0.999), 2) - 0.02 * 0.999**2) < 1e-18

    def test_constant(self):
        assert step_size(StepSchedule.constant(0.7), 123) == 0.7

    def test_positivity_validation(self):
        with pytest.raises(ValueError):
            StepSchedule.constant(0.0)
        with pytest.raises(ValueError):
            StepSchedule.harmonic(1.0, -2.0)
        with pytest.raises(ValueError):
            StepSchedule("mystery", 1.0)


class TestPdStep:
    def test_hand_arithmetic(self):
        sched = (StepSchedule.constant(0.1), StepSchedule.constant(0.1))
        theta, lam = pd_step(
            np.array([1.0]),
            np.array([2.0]),
            np.array([[0.5], [0.25]]),
            np.array([0.0, 0.0]),
            sched,
            1,
        )
        assert abs(theta[0] - 0.9) < 1e-15

    def test_projection_clamps(self):
        sched = (StepSchedule.constant(0.1), StepSchedule.constant(0.1))
        _, lam = pd_step(
            np.array([0.0]),
            np.array([0.5]),
            np.zeros((2, 1)),
            np.array([0.0, -10.0]),
            sched,
            1,
        )
        assert lam[0] == 0.0

    def test_fixed_point(self):
        sched = (StepSchedule.constant(0.1), StepSchedule.constant(0.1))
        theta, lam = pd_step(
            np.array([1.0, 2.0]),
            np.array([0.3]),
            np.zeros((2, 2)),
            np.array([5.0, 0.0]),
            sched,
            1,
        )
        assert np.array_equal(theta, [1.0, 2.0])
        assert np.array_equal(lam, [0.3])


class TestPpdStep:
    def test_reduces_to_pd_at_zero_perturbation(self):
        rng = np.random.default_rng(0)
        sched = (StepSchedule.constant(0.2), StepSchedule.constant(0.3))
        theta = rng.standard_normal(4)
        lam = np.abs(rng.standard_normal(2))
        grad = rng.standard_normal((3, 4))
        vals = rng.standard_normal(3)
        pd_theta, pd_lam = pd_step(theta, lam, grad, vals, sched, 2)
        ppd_theta, ppd_lam, t_tilde, l_tilde = ppd_step(
            theta, lam, grad, vals, vals, sched, 2, nu_theta=0.0, nu_lambda=0.0
        )
        assert np.allclose(ppd_theta, pd_theta, atol=1e-15)
        assert np.allclose(ppd_lam, pd_lam, atol=1e-15)
        assert np.allclose(t_tilde, theta, atol=1e-15)
        assert np.allclose(l_tilde, lam, atol=1e-15)

    def test_hand_arithmetic_through_all_four_substeps(self):
        sched = (StepSchedule.constant(0.1), StepSchedule.constant(1.0))
        theta, lam, theta_tilde, lam_tilde = ppd_step(
            np.array([1.0]),
            np.array([0.0]),
            np.array([[0.5], [0.2]]),
            np.array([0.0, 0.3]),   # F_1(theta) = 0.3
            np.array([0.0, 0.1]),   # F_1(theta_tilde) = 0.1
            sched,
            1,
            nu_theta=1.0,
            nu_lambda=1.0,
        )
        assert abs(lam_tilde[0] - 0.3) < 1e-15
        assert abs(theta[0] - 0.944) < 1e-15  # 1 - 0.1*(0.5 + 0.3*0.2)
        assert abs(lam[0] - 0.1) < 1e-15
        assert abs(theta_tilde[0] - 0.5) < 1e-15  # 1 - 1*(0.5 + 0*0.2)

    def test_slack_constraints_keep_dual_at_origin(self):
        sched = (StepSchedule.constant(0.1), StepSchedule.constant(0.5))
        _, lam, _, lam_tilde = ppd_step(
            np.array([1.0]),
            np.array([0.0]),
            np.zeros((2, 1)),
            np.array([1.0, -0.5]),
            np.array([1.0, -0.4]),
            sched,
            1,
            nu_theta=0.1,
            nu_lambda=0.1,
        )
        assert lam_tilde[0] == 0.0
        assert lam[0] == 0.0


class TestEgmStep:
    def test_reduces_to_pd(self):
        rng = np.random.default_rng(1)
        sched = (StepSchedule.constant(0.2), StepSchedule.constant(0.3))
        theta = rng.standard_normal(3)
        lam = np.abs(rng.standard_normal(1))
        grad = rng.standard_normal((2, 3))
        vals = rng.standard_normal(2)
        pd_theta, pd_lam = pd_step(theta, lam, grad, vals, sched, 1)
        egm_theta, egm_lam, _, _ = egm_step(
            theta, lam, grad, grad, vals, vals, sched, 1, nu_theta=0.0, nu_lambda=0.0
        )
        assert np.allclose(egm_theta, pd_theta, atol=1e-15)
        assert np.allclose(egm_lam, pd_lam, atol=1e-15)

    def test_fixed_point(self):
        sched = (StepSchedule.constant(0.2), StepSchedule.constant(0.3))
        theta, lam, _, _ = egm_step(
            np.array([1.0]),
            np.array([0.0]),
            np.zeros((2, 1)),
            np.zeros((2, 1)),
            np.array([0.0, 0.0]),
            np.array([0.0, 0.0]),
            sched,
            1,
            nu_theta=0.5,
            nu_lambda=0.5,
        )
        assert theta[0] == 1.0
        assert lam[0] == 0.0


class TestConfig:
    def test_validation(self):
        with pytest.raises(ValueError):
            OptimizerConfig(method="sgd")
        with pytest.raises(ValueError):
            OptimizerConfig(eps_conv=0.0)
        with pytest.raises(ValueError):
            OptimizerConfig(method="ppd", nu_theta=0.0)
        OptimizerConfig(method="pd", nu_theta=0.0, nu_lambda=0.0)  # pd ignores nu

    def test_shot_schedule_growth(self):
        cfg = OptimizerConfig(
            method="pd", nu_theta=0, nu_lambda=0, shots=1,
            shot_schedule=StepSchedule.harmonic(100, 0),
        )
        assert cfg.shots_at(1) == 100
        assert cfg.shots_at(100) == 1


def small_problem(seed=3, n=4, specs=2, formulation="average"):
    q = random_instance_s1(n, specs, np.random.default_rng(seed))
    return q, build_variational(q, formulation)


class TestRun:
    def test_constant_cost_slack_constraints_converge_immediately(self):
        # flat objective, strictly slack constraint, lambda stays at zero:
        # theta never moves and the run stops at iteration 2
        problem = lp_problem([2.0, 2.0, 2.0, 2.0], [[-1.0, -1.0, -1.0, -1.0]])
        spec = AnsatzSpec(2, 1)
        cfg = OptimizerConfig(
            method="ppd",
            mu_theta=StepSchedule.constant(0.5),
            mu_lambda=StepSchedule.constant(0.5),
            max_iterations=50,
        )
        theta0 = np.array([0.3, 1.1])
        trace = run(problem, spec, cfg, theta0)
        assert trace.converged_at == 2
        assert np.array_equal(trace.final_theta, theta0)
        assert np.array_equal(trace.final_lambda, [0.0])

    def test_bit_identical_reruns(self):
        _, problem = small_problem()
        spec = AnsatzSpec(4, 2)
        cfg = OptimizerConfig(
            method="ppd",
            mu_theta=StepSchedule.harmonic(1.5),
            mu_lambda=StepSchedule.harmonic(0.1, 15),
            max_iterations=12,
            shots=5,
            seed=77,
        )
        theta0 = np.random.default_rng(5).uniform(0, 2 * np.pi, 8)
        a = run(problem, spec, cfg, theta0)
        b = run(problem, spec, cfg, theta0)
        assert np.array_equal(a.thetas, b.thetas)
        assert np.array_equal(a.lambdas, b.lambdas)
        assert np.array_equal(a.values, b.values)

    @pytest.mark.parametrize("method,per_iter", [("pd", None), ("ppd", None), ("egm", None)])
    def test_compilation_and_shot_accounting(self, method, per_iter):
        _, problem = small_problem()
        spec = AnsatzSpec(4, 2)
        P = spec.num_parameters
        expected = {"pd": 2 * P + 1, "ppd": 2 * P + 2, "egm": 4 * P + 2}[method]
        for shots in (0, 3):
            cfg = OptimizerConfig(
                method=method,
                mu_theta=StepSchedule.harmonic(1.0),
                mu_lambda=StepSchedule.harmonic(0.1, 15),
                max_iterations=4,
                shots=shots,
                seed=1,
                min_iterations=4,
            )
            trace = run(problem, spec, cfg, np.random.default_rng(6).uniform(0, 6.28, P))
            steps = np.diff(np.concatenate(([0], trace.cum_compilations)))
            assert np.all(steps == expected)
            shot_steps = np.diff(np.concatenate(([0], trace.cum_shots)))
            assert np.all(shot_steps == expected * shots)

    def test_dual_iterates_stay_nonnegative(self):
        _, problem = small_problem(seed=11)
        spec = AnsatzSpec(4, 2)
        cfg = OptimizerConfig(
            method="ppd",
            mu_theta=StepSchedule.harmonic(1.5),
            mu_lambda=StepSchedule.constant(0.3),
            max_iterations=40,
            shots=2,
            seed=3,
        )
        trace = run(problem, spec, cfg, np.random.default_rng(8).uniform(0, 6.28, 8))
        assert np.all(trace.lambdas >= 0)
        assert np.all(trace.perturbed_lambdas >= 0)

    def test_gradient_evaluated_once_per_ppd_iteration(self, monkeypatch):
        calls = {"n": 0}
        original = optimizer_mod.parameter_shift_gradient

        def counting(req):
            calls["n"] += 1
            return original(req)

        monkeypatch.setattr(optimizer_mod, "parameter_shift_gradient", counting)
        _, problem = small_problem()
        spec = AnsatzSpec(4, 2)
        cfg = OptimizerConfig(
            method="ppd",
            mu_theta=StepSchedule.harmonic(1.0),
            mu_lambda=StepSchedule.harmonic(0.1, 15),
            max_iterations=5,
            min_iterations=5,
        )
        trace = run(problem, spec, cfg, np.random.default_rng(9).uniform(0, 6.28, 8))
        assert calls["n"] == trace.iterations

    def test_lagrangian_dominates_dual_function_along_run(self):
        # pointwise restriction bound: L(theta; lam) >= min_k (f0 + F lam)_k
        q, problem = small_problem(seed=13)
        spec = AnsatzSpec(4, 2)
        cfg = OptimizerConfig(
            method="ppd",
            mu_theta=StepSchedule.harmonic(1.5),
            mu_lambda=StepSchedule.harmonic(0.1, 15),
            max_iterations=60,
        )
        trace = run(problem, spec, cfg, np.random.default_rng(10).uniform(0, 6.28, 8))
        cost = problem.cost.as_vector()
        F = problem.constraint_matrix()
        for t in range(trace.iterations):
            lam = trace.lambdas[t]
            lagr = trace.values[t, 0] + lam @ trace.values[t, 1:]
            assert lagr >= dual_function(cost, F, lam) - 1e-9

    def test_divergence_guard_reports_iteration(self):
        problem = lp_problem([1e308, -1e308], [])
        spec = AnsatzSpec(1, 1)
        cfg = OptimizerConfig(
            method="pd",
            mu_theta=StepSchedule.constant(1e308),
            mu_lambda=StepSchedule.constant(1.0),
            max_iterations=10,
            nu_theta=0,
            nu_lambda=0,
        )
        with np.errstate(over="ignore"), pytest.raises(DivergenceError) as err:
            run(problem, spec, cfg, np.array([0.3]))
        assert err.value.iteration >= 1

    def test_corner_initialization_is_a_fixed_point(self):
        # gradients vanish on the basis-preparation grid, so an exact-mode
        # run started at a brute-force minimizer must not move at all
        q, problem = small_problem(seed=21, formulation="deterministic")
        best = brute_force_qcbo(q)
        spec = AnsatzSpec(4, 3)
        theta0 = corner_params(spec, int(best.minimizers[0]))
        cfg = OptimizerConfig(
            method="ppd",
            mu_theta=StepSchedule.harmonic(12, 10),
            mu_lambda=StepSchedule.harmonic(4, 15),
            nu_theta=1.0,
            nu_lambda=1.5,
            max_iterations=20,
            min_iterations=20,
        )
        trace = run(problem, spec, cfg, theta0)
        assert np.max(np.abs(trace.thetas - theta0[None, :])) < 1e-12

    def test_min_iterations_defers_convergence(self):
        problem = lp_problem([2.0, 2.0], [])
        spec = AnsatzSpec(1, 1)
        cfg = OptimizerConfig(
            method="pd",
            mu_theta=StepSchedule.constant(0.5),
            mu_lambda=StepSchedule.constant(0.5),
            max_iterations=30,
            min_iterations=7,
            nu_theta=0,
            nu_lambda=0,
        )
        trace = run(problem, spec, cfg, np.array([0.4]))
        assert trace.converged_at == 7

    def test_trace_reference_errors(self):
        _, problem = small_problem(seed=23)
        spec = AnsatzSpec(4, 2)
        cfg = OptimizerConfig(
            method="ppd",
            mu_theta=StepSchedule.harmonic(1.5),
            mu_lambda=StepSchedule.harmonic(0.1, 15),
            max_iterations=10,
        )
        trace = run(problem, spec, cfg, np.random.default_rng(11).uniform(0, 6.28, 8))
        sol = lp_solve(problem)
        trace.reference_optimum = sol.value
        errs = trace.rel_cost_errors()
        assert errs.shape == (trace.iterations,)
        expected = abs((trace.values[0, 0] - sol.value) / sol.value)
        assert abs(errs[0] - expected) < 1e-15
