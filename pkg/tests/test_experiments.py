import csv
import json

import numpy as np
import pytest

from vqec.cli import main, parse_schedule
from vqec.experiments import (
    ExperimentConfig,
    build_problem,
    emit_trace,
    run_experiment,
)
from vqec.optimizer import StepSchedule
from vqec.problems import load_instance


def tiny_config(tmp_path, **kw):
    base = dict(
        setup="s1",
        n=5,
        num_specs=2,
        depth=2,
        max_iterations=8,
        repetitions=2,
        seed=123,
        out_dir=str(tmp_path / "out"),
        min_iterations=8,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def read_csv(path):
    with open(path) as fh:
        rows = list(csv.reader(fh))
    return rows[0], rows[1:]


class TestConfig:
    def test_setup_defaults(self):
        cfg = ExperimentConfig(setup="s2").resolved()
        assert cfg.formulation == "deterministic"
        assert cfg.mu_theta == StepSchedule.harmonic(12, 10)
        assert cfg.nu_lambda == 1.5
        cfg3 = ExperimentConfig(setup="s3").resolved()
        assert cfg3.n == 8
        assert cfg3.mu_theta.kind == "geometric"

    def test_explicit_fields_survive_resolution(self):
        cfg = ExperimentConfig(setup="s1", mu_theta=StepSchedule.constant(0.9)).resolved()
        assert cfg.mu_theta == StepSchedule.constant(0.9)
        assert cfg.mu_lambda == StepSchedule.harmonic(0.1, 15)

    def test_validation(self):
        with pytest.raises(ValueError):
            ExperimentConfig(setup="s9")
        with pytest.raises(ValueError):
            ExperimentConfig(setup="custom")
        with pytest.raises(ValueError):
            ExperimentConfig(repetitions=0)


class TestBuildProblem:
    def test_s1_s2_share_the_instance(self):
        avg = build_problem(ExperimentConfig(setup="s1", n=6, num_specs=3, seed=7))
        det = build_problem(ExperimentConfig(setup="s2", n=6, num_specs=3, seed=7))
        assert np.array_equal(avg.cost.as_vector(), det.cost.as_vector())
        assert avg.formulation == "average"
        assert det.formulation == "deterministic"

    def test_s3_dimensions(self):
        problem = build_problem(ExperimentConfig(setup="s3", seed=5))
        assert problem.cost.as_vector().shape == (256,)
        assert problem.num_constraints == 3

    def test_seed_determinism(self):
        a = build_problem(ExperimentConfig(setup="s1", n=6, num_specs=3, seed=9))
        b = build_problem(ExperimentConfig(setup="s1", n=6, num_specs=3, seed=9))
        assert np.array_equal(a.cost.as_vector(), b.cost.as_vector())


class TestRunExperiment:
    def test_artifacts_written(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_experiment(cfg)
        out = result.out_dir
        assert (out / "instance.json").exists()
        assert (out / "summary.json").exists()
        assert (out / "rep_01_trace.csv").exists()
        assert (out / "rep_02_trace.csv").exists()
        assert (out / "rep_01_thetas.csv").exists()
        summary = json.loads((out / "summary.json").read_text())
        assert summary["reference"]["lp_status"] == "optimal"
        assert len(summary["repetitions"]) == 2

    def test_instance_round_trip(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_experiment(cfg)
        loaded = load_instance(result.out_dir / "instance.json")
        assert np.array_equal(loaded.cost.A, result.problem.source.cost.A)
        assert np.array_equal(loaded.constraints[0].c, result.problem.source.constraints[0].c)

    def test_trace_csv_columns_and_redundancy(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_experiment(cfg)
        header, rows = read_csv(result.out_dir / "rep_01_trace.csv")
        assert header == [
            "iter", "lambda_1", "F_0", "F_1",
            "rel_cost_err", "lagrangian", "theta_change_rel", "cum_shots", "cum_compilations",
        ]
        p_star = result.lp.value
        for row in rows:
            f0 = float(row[header.index("F_0")])
            rel = float(row[header.index("rel_cost_err")])
            assert rel == pytest.approx(abs((f0 - p_star) / p_star), rel=1e-12)
            # exact mode: no shots consumed
            assert row[header.index("cum_shots")] == "0"

    def test_exact_mode_shot_column_zero_but_compilations_counted(self, tmp_path):
        cfg = tiny_config(tmp_path)
        result = run_experiment(cfg)
        trace = result.repetitions[0].trace
        P = trace.num_parameters
        assert trace.cum_shots[-1] == 0
        assert trace.cum_compilations[-1] == trace.iterations * (2 * P + 2)

    def test_single_iteration_trace_has_two_lines(self, tmp_path):
        cfg = tiny_config(tmp_path, max_iterations=1, min_iterations=1, repetitions=1)
        result = run_experiment(cfg)
        with open(result.out_dir / "rep_01_trace.csv") as fh:
            lines = fh.read().strip().splitlines()
        assert len(lines) == 2

    def test_repetitions_share_theta0_but_not_measurement_streams(self, tmp_path):
        cfg = tiny_config(tmp_path, shots=5)
        a = run_experiment(cfg)
        t1, t2 = a.repetitions[0].trace, a.repetitions[1].trace
        assert np.array_equal(t1.thetas[0], t2.thetas[0])
        assert not np.array_equal(t1.values, t2.values)
        cfg_again = tiny_config(tmp_path, shots=5, out_dir=str(tmp_path / "out2"))
        b = run_experiment(cfg_again)
        assert np.array_equal(t1.thetas, b.repetitions[0].trace.thetas)
        assert np.array_equal(t1.values, b.repetitions[0].trace.values)

    def test_exact_mode_repetitions_are_redundant(self, tmp_path):
        cfg = tiny_config(tmp_path)
        a = run_experiment(cfg)
        assert np.array_equal(
            a.repetitions[0].trace.thetas, a.repetitions[1].trace.thetas
        )

    def test_worst_case_success_is_the_minimum(self, tmp_path):
        cfg = tiny_config(tmp_path, repetitions=3, max_iterations=5, min_iterations=5)
        result = run_experiment(cfg)
        probs = [r.success_prob for r in result.repetitions]
        assert result.summary["worst_case_success_probability"] == min(probs)

    def test_s3_run(self, tmp_path):
        cfg = ExperimentConfig(
            setup="s3", n=4, lp_constraints=2, depth=2, max_iterations=5,
            repetitions=1, seed=3, out_dir=str(tmp_path / "lp"), shots=10,
            min_iterations=5,
        )
        result = run_experiment(cfg)
        trace = result.repetitions[0].trace
        assert trace.cum_shots[-1] == trace.cum_compilations[-1] * 10
        loaded = load_instance(result.out_dir / "instance.json")
        assert np.array_equal(loaded.cost.as_vector(), result.problem.cost.as_vector())

    def test_custom_instance_setup(self, tmp_path):
        first = run_experiment(tiny_config(tmp_path))
        cfg = ExperimentConfig(
            setup="custom",
            instance_file=str(first.out_dir / "instance.json"),
            formulation="average",
            depth=2,
            max_iterations=4,
            repetitions=1,
            seed=1,
            out_dir=str(tmp_path / "custom"),
            min_iterations=4,
        )
        result = run_experiment(cfg)
        assert np.array_equal(
            result.problem.cost.as_vector(), first.problem.cost.as_vector()
        )


class TestEmitTrace:
    def test_no_reference_writes_nan(self, tmp_path):
        cfg = tiny_config(tmp_path, repetitions=1, max_iterations=3, min_iterations=3)
        result = run_experiment(cfg)
        trace = result.repetitions[0].trace
        trace.reference_optimum = None
        path = emit_trace(trace, tmp_path / "bare.csv")
        header, rows = read_csv(path)
        assert all(row[header.index("rel_cost_err")] == "nan" for row in rows)


class TestCli:
    def test_parse_schedule(self):
        assert parse_schedule("constant:0.5") == StepSchedule.constant(0.5)
        assert parse_schedule("harmonic:1.5:0") == StepSchedule.harmonic(1.5, 0)
        assert parse_schedule("geometric:0.02:0.999") == StepSchedule.geometric(0.02, 0.999)
        with pytest.raises(Exception):
            parse_schedule("linear:1.0")

    def test_end_to_end(self, tmp_path, capsys):
        code = main([
            "--setup", "s1", "--n", "4", "--specs", "2", "--depth", "2",
            "--iters", "5", "--min-iters", "5", "--reps", "1", "--seed", "11",
            "--out", str(tmp_path / "cli"), "--no-thetas",
        ])
        assert code == 0
        assert (tmp_path / "cli" / "summary.json").exists()
        assert not (tmp_path / "cli" / "rep_01_thetas.csv").exists()

    def test_flag_overrides_schedule(self, tmp_path):
        code = main([
            "--setup", "s1", "--n", "4", "--specs", "0", "--depth", "1",
            "--mu-theta", "constant:0.2", "--iters", "3", "--min-iters", "3",
            "--reps", "1", "--seed", "1", "--out", str(tmp_path / "cli2"),
        ])
        assert code == 0

    def test_config_file(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "setup": "s1", "n": 4, "num_specs": 1, "depth": 1,
            "max_iterations": 3, "min_iterations": 3, "repetitions": 1,
            "mu_theta": "harmonic:1.0:0",
            "out_dir": str(tmp_path / "from_config"),
        }))
        assert main(["--config", str(cfg_path)]) == 0
        assert (tmp_path / "from_config" / "summary.json").exists()

    def test_error_exit_code(self, tmp_path, capsys):
        code = main(["--setup", "custom", "--out", str(tmp_path / "x")])
        assert code == 1
        assert "error" in capsys.readouterr().err

    def test_unknown_config_key_fails(self, tmp_path, capsys):
        cfg_path = tmp_path / "bad.json"
        cfg_path.write_text('{"mystery": 1}')
        assert main(["--config", str(cfg_path)]) == 1
