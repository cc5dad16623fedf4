"""Command-line entry point for the experiment runner.

Flags mirror ExperimentConfig one-to-one; a JSON config file can seed the
defaults, with explicit flags taking precedence.  Step schedules are given
as "constant:A", "harmonic:A:B" (A/(t+B)) or "geometric:A:Q" (A*Q**t).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import fields

from .experiments import ExperimentConfig, run_experiment
from .optimizer import StepSchedule


def parse_schedule(text: str) -> StepSchedule:
    parts = text.split(":")
    kind = parts[0]
    try:
        if kind == "constant":
            return StepSchedule.constant(float(parts[1]))
        if kind == "harmonic":
            return StepSchedule.harmonic(float(parts[1]), float(parts[2]) if len(parts) > 2 else 0.0)
        if kind == "geometric":
            return StepSchedule.geometric(float(parts[1]), float(parts[2]))
    except (IndexError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"bad schedule {text!r}: {exc}") from exc
    raise argparse.ArgumentTypeError(f"unknown schedule kind {kind!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vqec",
        description="Constrained variational quantum optimization experiments",
    )
    parser.add_argument("--config", help="JSON file with ExperimentConfig fields")
    parser.add_argument("--setup", choices=("s1", "s2", "s3", "custom"))
    parser.add_argument("--instance", dest="instance_file", help="instance file for --setup custom")
    parser.add_argument("--n", type=int, help="qubit count (LP size is 2**n)")
    parser.add_argument("--specs", dest="num_specs", type=int, help="number of graph specifications")
    parser.add_argument("--lp-constraints", dest="lp_constraints", type=int)
    parser.add_argument("--depth", type=int)
    parser.add_argument("--entanglement", choices=("full", "linear", "circular"))
    parser.add_argument("--repeat", type=int, help="per-parameter gate repetition factor")
    parser.add_argument(
        "--formulation", choices=("average", "deterministic", "chance", "explicit-lp")
    )
    parser.add_argument("--beta", type=float, help="chance-constraint violation probability")
    parser.add_argument("--shots", type=int, help="measurement shots per compilation (0 = exact)")
    parser.add_argument("--method", choices=("pd", "ppd", "egm"))
    parser.add_argument("--mu-theta", dest="mu_theta", type=parse_schedule)
    parser.add_argument("--mu-lambda", dest="mu_lambda", type=parse_schedule)
    parser.add_argument("--nu-theta", dest="nu_theta", type=float)
    parser.add_argument("--nu-lambda", dest="nu_lambda", type=float)
    parser.add_argument("--iters", dest="max_iterations", type=int)
    parser.add_argument("--eps-conv", dest="eps_conv", type=float)
    parser.add_argument("--min-iters", dest="min_iterations", type=int)
    parser.add_argument("--reps", dest="repetitions", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out", dest="out_dir")
    parser.add_argument("--no-thetas", action="store_true", help="skip the parameter sidecar files")
    return parser


def config_from_args(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        with open(args.config) as fh:
            raw = json.load(fh)
        valid = {f.name for f in fields(ExperimentConfig)}
        for key, val in raw.items():
            if key not in valid:
                raise ValueError(f"unknown config key {key!r}")
            if key in ("mu_theta", "mu_lambda") and isinstance(val, str):
                val = parse_schedule(val)
            values[key] = val
    for f in fields(ExperimentConfig):
        got = getattr(args, f.name, None)
        if got is not None:
            values[f.name] = got
    if args.no_thetas:
        values["save_thetas"] = False
    return ExperimentConfig(**values)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        result = run_experiment(cfg)
    except Exception as exc:  # diagnostic exit for scripting
        print(f"vqec: error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {result.out_dir / 'summary.json'}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
