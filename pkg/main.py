"""
Main entry point for StringBound
"""
import argparse
import json
import logging
import os
import sys
from dataclasses import dataclass
from typing import List, Optional

import pandas as pd

from bounds import FAILED, BoundSuite
from curvature import curvature_profile
from matroid import constrained_greedy, constrained_optimal, validate_axioms
from strategies.exhaustive import optimal_exhaustive
from strategies.greedy import backward_greedy, greedy
from sweep import run_sweep
from utils.config import CONFIG
from utils.errors import BudgetExceededError
from utils.export import FORMATS, export_frame
from utils.instance_loader import MODELS, InstanceLoader, LoadedInstance, parse_grid
from utils.strings import format_string

COMMANDS = ("solve", "curvature", "bounds", "validate-matroid", "sweep")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_INPUT = 2
EXIT_BUDGET = 3


@dataclass
class RunConfig:
    """One CLI invocation"""
    command: str = "bounds"
    instance_path: Optional[str] = None
    model_kind: str = "table"
    output_path: Optional[str] = None
    output_format: str = "csv"
    tol: float = CONFIG['TOL']
    budget: int = CONFIG['BUDGET']
    seed: int = 0
    grid: Optional[List[float]] = None
    search_len: Optional[int] = None
    num_actions: Optional[int] = None
    horizon: Optional[int] = None
    workers: int = CONFIG['WORKERS']

    def validate(self) -> bool:
        """
        Validate the configuration

        Returns:
            True if valid, raises ValueError otherwise
        """
        if self.command not in COMMANDS:
            raise ValueError(f"Unknown command: {self.command}")
        if self.model_kind not in MODELS:
            raise ValueError(f"Unknown model: {self.model_kind}")
        if self.output_format not in FORMATS:
            raise ValueError(f"Unknown format: {self.output_format}")
        if not self.tol > 0:
            raise ValueError(f"tol must be > 0, got {self.tol}")
        if self.budget < 1:
            raise ValueError(f"budget must be >= 1, got {self.budget}")
        if self.command == "sweep" and self.instance_path is None:
            raise ValueError("sweep needs --instance pointing at a sweep document")
        if self.instance_path is not None and not os.path.exists(self.instance_path):
            raise ValueError(f"Instance file not found: {self.instance_path}")
        return True

    @property
    def out(self) -> str:
        if self.output_path:
            return self.output_path
        return os.path.join(CONFIG['OUTPUT_DIR'], f"{self.command}.{self.output_format}")


def load_instance(config: RunConfig) -> LoadedInstance:
    """Instance file if given, else a random draw from the seed"""
    loader = InstanceLoader(grid=config.grid, horizon=config.horizon)
    if config.instance_path:
        return loader.load(config.instance_path, config.model_kind)
    print(f"No instance file; drawing a random {config.model_kind} instance (seed {config.seed})")
    return loader.generate(config.model_kind, config.seed, num_actions=config.num_actions)


def solve(instance: LoadedInstance, config: RunConfig) -> pd.DataFrame:
    """Greedy strategies against the exhaustive optimum"""
    spec = instance.spec
    if instance.matroid is None:
        traces = [greedy(spec), backward_greedy(spec)]
        optimum, f_opt = optimal_exhaustive(spec, config.budget)
    else:
        traces = [constrained_greedy(spec, instance.matroid)]
        optimum, f_opt = constrained_optimal(spec, instance.matroid, config.budget)

    rows = [
        {
            "strategy": trace.name,
            "string": format_string(trace.strategy),
            "value": trace.value,
            "ratio": 1.0 if f_opt == 0 else trace.value / f_opt,
            "complete": trace.complete
        }
        for trace in traces
    ]
    rows.append({"strategy": "optimal", "string": format_string(optimum), "value": f_opt, "ratio": 1.0, "complete": True})
    frame = pd.DataFrame(rows)

    print("\n" + "=" * 60)
    print(f"SOLVE: {spec.objective.name} (|A|={spec.num_actions}, K={spec.horizon})")
    print("=" * 60)
    for row in rows:
        print(f"{row['strategy']:<20} {row['string']:<20} f = {row['value']:.6f}  ratio = {row['ratio']:.6f}")
    print("=" * 60 + "\n")
    return frame


def curvatures(instance: LoadedInstance, config: RunConfig) -> pd.DataFrame:
    spec = instance.spec
    reports = curvature_profile(
        spec.objective, spec.num_actions, spec.horizon,
        search_len=config.search_len, tol=config.tol, budget=config.budget
    )
    rows = []
    for report in reports:
        row = report.to_dict()
        row["witness"] = report.witness_text()
        rows.append(row)
        print(f"{report.kind:<14} {report.value:12.6f}  {row['witness']}")
    return pd.DataFrame(rows)


def run(config: RunConfig) -> int:
    """
    Dispatch one command and write its output

    Returns:
        Exit status: 0 ok, 1 a bound check FAILED, 2 input error, 3 budget exceeded
    """
    try:
        config.validate()
        if config.command == "sweep":
            with open(config.instance_path, "r") as f:
                doc = json.load(f)
            frame = run_sweep(doc, config.workers, config.tol, config.budget, config.grid)
            export_frame(frame, config.out, config.output_format, {"model": doc["model"], "sweep": doc["sweep"]})
            print(f"Sweep exported to: {config.out}")
            return EXIT_FAILED if int(frame["failed"].sum()) else EXIT_OK

        instance = load_instance(config)

        if config.command == "solve":
            export_frame(solve(instance, config), config.out, config.output_format)
            print(f"Results exported to: {config.out}")
            return EXIT_OK

        if config.command == "curvature":
            export_frame(curvatures(instance, config), config.out, config.output_format)
            print(f"Curvatures exported to: {config.out}")
            return EXIT_OK

        if config.command == "validate-matroid":
            if instance.matroid is None:
                raise ValueError("validate-matroid needs a table instance with a \"matroid\" entry")
            report = validate_axioms(instance.matroid, instance.spec.num_actions, config.budget)
            print(f"Matroid {instance.matroid.name} (rank {instance.matroid.rank}): {report.count} axiom violations")
            export_frame(report.to_frame(), config.out, config.output_format, report.to_dict())
            return EXIT_OK

        suite = BoundSuite(instance.spec, instance.matroid, config.tol, config.budget)
        results = suite.run()
        suite.print_summary(results)
        suite.export_results(results, config.out, config.output_format)
        return EXIT_FAILED if any(c.status == FAILED for c in suite.checks) else EXIT_OK

    except BudgetExceededError as e:
        print(f"Budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET
    except (ValueError, KeyError, OSError, json.JSONDecodeError) as e:
        print(f"Input error: {e}", file=sys.stderr)
        return EXIT_INPUT


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="StringBound: greedy string-submodular maximization with verified bounds"
    )
    parser.add_argument("--instance", type=str, help="Instance JSON (sweep document for --cmd sweep)")
    parser.add_argument("--model", type=str, default="table", choices=MODELS, help="Instance model (default: table)")
    parser.add_argument("--cmd", type=str, default="bounds", choices=COMMANDS, help="Command (default: bounds)")
    parser.add_argument("--out", type=str, help="Output file (default: <OUTPUT_DIR>/<cmd>.<format>)")
    parser.add_argument("--format", type=str, default="csv", choices=FORMATS, help="Output format (default: csv)")
    parser.add_argument("--tol", type=float, default=CONFIG['TOL'], help="Comparison tolerance")
    parser.add_argument("--budget", type=int, default=CONFIG['BUDGET'], help="Oracle evaluation cap")
    parser.add_argument("--seed", type=int, default=0, help="Seed for random instances (default: 0)")
    parser.add_argument("--grid", type=str, help="Info-gain power splits, e.g. 0,0.5,1")
    parser.add_argument("--search-len", type=int, help="Longest M in curvature searches (default: 2K)")
    parser.add_argument("--num-actions", type=int, help="Action count for random instances")
    parser.add_argument("--horizon", type=int, help="Horizon K (overrides the instance)")
    parser.add_argument("--workers", type=int, default=CONFIG['WORKERS'], help="Sweep processes")
    parser.add_argument("--verbose", action="store_true", help="Debug logging")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Command-line interface"""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s"
    )
    try:
        grid = parse_grid(args.grid)
    except ValueError as e:
        print(f"Input error: {e}", file=sys.stderr)
        return EXIT_INPUT

    config = RunConfig(
        command=args.cmd,
        instance_path=args.instance,
        model_kind=args.model,
        output_path=args.out,
        output_format=args.format,
        tol=args.tol,
        budget=args.budget,
        seed=args.seed,
        grid=grid,
        search_len=args.search_len,
        num_actions=args.num_actions,
        horizon=args.horizon,
        workers=args.workers
    )
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
