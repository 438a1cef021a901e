"""Command-line front end.

Exit codes: 0 on success (for ``eval``, the formula is robustly satisfied),
1 when the formula is falsified or a check fails, 2 on any error.
"""

import argparse
import logging
import sys
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from .benchmark import DEFAULT_BENCH_FORMULA, bench
from .exceptions import MonitorException
from .falsify import load_experiment_config, run_experiment
from .generators import random_instance, sample_times
from .models.formulas import Formula, temporal_horizon
from .models.signals import Trace
from .oracle import cross_check, minimize_counterexample
from .parser import parse, unparse
from .robustness import robust_signal
from .utils import format_extended

__all__ = ("build_parser", "main")

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_ERROR = 2


def _read_formula(args: argparse.Namespace) -> Formula:
    if args.formula_file:
        return parse(Path(args.formula_file).read_text(encoding="utf-8"))

    return parse(args.formula)


def _read_trace(args: argparse.Namespace, formula: Formula) -> Trace:
    trace = Trace.from_csv(args.trace)
    horizon = temporal_horizon(formula)

    if horizon > trace.horizon:
        logging.warning(
            f"formula looks {horizon:g}s ahead but the trace ends at {trace.horizon:g}s; its last values are held")

    return trace


def cmd_eval(args: argparse.Namespace) -> int:
    formula = _read_formula(args)
    trace = _read_trace(args, formula)
    signal = robust_signal(trace, formula)
    result = signal.at(0.0)

    if args.dump_signal:
        signal.to_csv(args.dump_signal)

    print(f"pos={format_extended(result.pos)} neg={format_extended(result.neg)}")

    return EXIT_FAILED if result.falsified else EXIT_OK


def cmd_signal(args: argparse.Namespace) -> int:
    formula = _read_formula(args)
    trace = _read_trace(args, formula)
    robust_signal(trace, formula).to_csv(args.out)

    return EXIT_OK


def _describe(trace: Trace, formula: Formula) -> str:
    lines = [f"formula: {unparse(formula)}"]

    for name in sorted(trace.channels):
        steps = ", ".join(f"({t:.17g}, {v:.17g})" for t, v, _ in trace[name].segments)
        lines.append(f"{name}: {steps}")

    return "\n".join(lines)


def cmd_oracle_check(args: argparse.Namespace) -> int:
    rng = np.random.default_rng(args.seed)
    mismatches = 0

    for index in range(args.count):
        trace, formula = random_instance(rng, max_depth=args.max_depth, max_segments=args.max_segments)
        times = [0.0] + sample_times(rng, trace, args.samples)
        problem = cross_check(trace, formula, times)

        if problem is None:
            continue

        mismatches += 1
        small_trace, small_formula = minimize_counterexample(
            trace, formula, lambda tr, f: cross_check(tr, f, times) is not None)

        print(f"instance {index}: {cross_check(small_trace, small_formula, times)}")
        print(_describe(small_trace, small_formula))

    print(f"checked {args.count} instances, {mismatches} mismatches")

    return EXIT_FAILED if mismatches else EXIT_OK


def cmd_bench(args: argparse.Namespace) -> int:
    formula = _read_formula(args)
    report = bench(args.sizes, formula, args.repetitions, args.seed)
    print(report.table())

    return EXIT_OK if report.passed else EXIT_FAILED


def cmd_falsify(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config)
    seeds = config.seeds

    if seeds is None:
        seeds = [args.seed + trial for trial in range(config.trials)]

    report = run_experiment(config.problems, config.trials, seeds, config.optimizer)

    if args.report:
        Path(args.report).write_text(report.model_dump_json(indent=2), encoding="utf-8")

    print(report.table())

    return EXIT_OK


def _add_formula_arguments(parser: argparse.ArgumentParser, default: str = None):
    group = parser.add_mutually_exclusive_group(required=default is None)
    group.add_argument("--formula", default=default, help="formula text")
    group.add_argument("--formula-file", help="file holding the formula text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avstl", description="Averaged STL robustness monitor.")
    parser.add_argument("--log-level", choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="override LOG_LEVEL")
    commands = parser.add_subparsers(dest="command", required=True)

    evaluate = commands.add_parser("eval", help="robustness of a formula at time 0")
    evaluate.add_argument("trace", help="CSV trace with a time,var1,var2,... header")
    _add_formula_arguments(evaluate)
    evaluate.add_argument("--dump-signal", metavar="OUT", help="also write the robustness signal as CSV")
    evaluate.set_defaults(handler=cmd_eval)

    signal = commands.add_parser("signal", help="export the robustness signal as CSV")
    signal.add_argument("trace", help="CSV trace with a time,var1,var2,... header")
    _add_formula_arguments(signal)
    signal.add_argument("--out", required=True, help="output CSV path")
    signal.set_defaults(handler=cmd_signal)

    oracle = commands.add_parser("oracle-check", help="cross-check the engine against brute force")
    oracle.add_argument("--count", type=int, default=1000)
    oracle.add_argument("--max-depth", type=int, default=4)
    oracle.add_argument("--max-segments", type=int, default=50)
    oracle.add_argument("--samples", type=int, default=3, help="extra sample times per instance")
    oracle.add_argument("--seed", type=int, default=0)
    oracle.set_defaults(handler=cmd_oracle_check)

    benchmark = commands.add_parser("bench", help="time the engine over growing traces")
    benchmark.add_argument("--sizes", type=int, nargs="+", default=[10_000, 20_000])
    _add_formula_arguments(benchmark, DEFAULT_BENCH_FORMULA)
    benchmark.add_argument("--repetitions", type=int, default=5)
    benchmark.add_argument("--seed", type=int, default=0)
    benchmark.set_defaults(handler=cmd_bench)

    falsify = commands.add_parser("falsify", help="run a plain-versus-refined falsification experiment")
    falsify.add_argument("--config", required=True, help="experiment JSON file")
    falsify.add_argument("--report", help="write the report as JSON")
    falsify.add_argument("--seed", type=int, default=0, help="first seed when the config lists none")
    falsify.set_defaults(handler=cmd_falsify)

    return parser


def main(argv: list[str] = None) -> int:
    args = build_parser().parse_args(argv)

    if args.log_level:
        logging.getLogger().setLevel(args.log_level)

    try:
        return args.handler(args)
    except (MonitorException, ValidationError, OSError) as e:
        logging.debug(f"{args.command} failed", exc_info=e)
        print(f"error: {e}", file=sys.stderr)

        return EXIT_ERROR
