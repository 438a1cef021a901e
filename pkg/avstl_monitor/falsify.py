"""Robustness-guided falsification and the plain-versus-refined experiment runner."""

import logging
import math
import time
from pathlib import Path
from typing import Sequence

import numpy as np
from pydantic import ValidationError

from .exceptions import ConfigurationError, RefinementError, UnsupportedFormula
from .models.falsify import (
    CatalogueReference, ExperimentConfig, ExperimentReport, FalsifyResult, InputChannel, InputSpec,
    OptimizerConfig, OptimizerKind, Problem, ProblemReport, VariantSummary,
)
from .models.formulas import Always, Eventually, Formula, averaged_depth
from .models.signals import Trace
from .models.simulation import ModelKind
from .parser import parse, unparse
from .refinement import refine_always, refine_eventually, refinable_paths
from .robustness import evaluate
from .simulation import Model, build_model, simulate

__all__ = (
    "CATALOGUE_DEFAULTS",
    "catalogue_problem",
    "falsification_loop",
    "run_experiment",
    "load_experiment_config",
)

CATALOGUE_DEFAULTS = {"P1": 20.0, "P2": 10.0, "P3": 4.0, "P4": 1.0, "P5": 1.0, "P6": 10.0}

_SHIFT_SETTLE = 0.04


def _throttle(horizon: float, control_points: int = 5) -> InputSpec:
    return InputSpec(
        channels=[InputChannel(name="throttle", lo=0.0, hi=1.0, control_points=control_points)], horizon=horizon)


def _refine_all(formula: Formula, kind: type[Formula], tail: float = None) -> Formula:
    """Refine every refinable node of ``kind`` whose interval is bounded."""

    # deepest first, so earlier rewrites leave the remaining paths valid
    paths = sorted((path for path, found in refinable_paths(formula) if found is kind), key=len, reverse=True)

    for path in paths:
        formula = refine_eventually(formula, path) if kind is Eventually else refine_always(formula, path, tail)

    return formula


def catalogue_problem(name: str, T: float = None) -> Problem:
    """Toy-scale counterpart of the automatic-transmission falsification benchmarks.

    Raises:
        ConfigurationError: If ``name`` is not a catalogue entry or ``T`` does not fit it.
    """

    if name not in CATALOGUE_DEFAULTS:
        raise ConfigurationError(f"unknown catalogue problem {name}")

    T = CATALOGUE_DEFAULTS[name] if T is None else T

    try:
        model, horizon, plain, refined = _catalogue_formulas(name, T)
    except RefinementError as e:
        raise ConfigurationError(f"T={T} does not fit problem {name}: {e}") from e

    return Problem(
        name=f"{name}[T={T:g}]",
        model=model,
        input_spec=_throttle(horizon),
        plain=unparse(plain),
        refined=unparse(refined),
    )


def _catalogue_formulas(name: str, T: float) -> tuple[ModelKind, float, Formula, Formula]:
    eps = _SHIFT_SETTLE

    match name:
        case "P1":
            model, horizon = ModelKind.ENGINE_LAG, T
            plain = parse(f"F[0,{T}] omega >= 2000")
            refined = _refine_all(plain, Eventually)
        case "P2":
            model, horizon = ModelKind.ENGINE_LAG, 3 * T
            plain = parse(f"G F[0,{T}] (omega <= 3500 | omega >= 4500)")
            refined = _refine_all(plain, Eventually)
        case "P3":
            model, horizon, end = ModelKind.GEAR_AUTOMATON, 10.0, 10.0
            plain = parse(f"G[0,{T}] !gear4")
            refined = _refine_all(plain, Always, end - T)
        case "P4":
            model, horizon, end = ModelKind.GEAR_AUTOMATON, 10.0, 10.0
            plain = parse(f"F G[0,{T}] gear3")
            refined = _refine_all(plain, Always, end - T)
        case "P5":
            model, horizon, end = ModelKind.GEAR_AUTOMATON, 10.0, 5.0
            conjuncts = [
                f"G((!gear{i} & F[0,{eps}] gear{i}) -> G[{eps},{T + eps}] gear{i})" for i in range(1, 5)]
            plain = parse(" & ".join(conjuncts))
            refined = plain

            for path, node in plain.walk():
                if isinstance(node, Always) and node.interval.bounded and node.interval.lo == eps:
                    refined = refine_always(refined, path, end - T - eps)
        case _:
            model, horizon, end = ModelKind.ENGINE_LAG, 20.0, 20.0
            plain = parse(f"G[0,{T}] v <= 85 | F omega >= 4500")
            refined = _refine_all(plain, Always, end - T)

    return model, horizon, plain, refined


def falsification_loop(model: Model, spec: Formula, input_spec: InputSpec, opt: OptimizerConfig) -> FalsifyResult:
    """Search for an input whose simulated output has non-positive robustness.

    Every iteration proposes a control-point vector, builds the input, simulates
    the model and scores the output by its positive robustness; the search stops
    at the first score ``<= 0`` or when the budget runs out.

    Raises:
        UnsupportedFormula: If ``spec`` nests averaged operators.
        SimulationError: If the model rejects an input.
    """

    if averaged_depth(spec) > 1:
        raise UnsupportedFormula("averaged operators cannot be nested")

    rng = np.random.default_rng(opt.seed)
    lows, highs = input_spec.bounds
    scale = opt.proposal_stddev * (highs - lows)
    started = time.perf_counter()
    history: list[float] = []

    def score(vector: np.ndarray) -> tuple[float, Trace]:
        trace = input_spec.build(vector.tolist())
        output = simulate(model, trace, input_spec.horizon)

        return evaluate(output, spec).pos, trace

    def fresh() -> np.ndarray:
        return rng.uniform(lows, highs)

    current = fresh()
    current_score, trace = score(current)
    history.append(current_score)
    best_score = current_score
    temperature = opt.initial_temperature
    stale = 0

    while current_score > 0 and len(history) < opt.max_iterations:
        if opt.kind == OptimizerKind.RANDOM:
            candidate = fresh()
        elif stale >= opt.restart_after:
            logging.debug(f"Restarting after {stale} non-improving iterations at best {best_score}")
            candidate = fresh()
            temperature = opt.initial_temperature
            stale = 0
        else:
            candidate = np.clip(current + rng.normal(0.0, scale), lows, highs)

        candidate_score, candidate_trace = score(candidate)
        history.append(candidate_score)

        if candidate_score <= 0:
            current, current_score, trace = candidate, candidate_score, candidate_trace
            break

        if candidate_score < best_score:
            best_score, stale = candidate_score, 0
        else:
            stale += 1

        if opt.kind == OptimizerKind.RANDOM or candidate_score <= current_score \
                or rng.random() < math.exp(-(candidate_score - current_score) / temperature):
            current, current_score = candidate, candidate_score

        temperature *= opt.cooling_rate

    success = history[-1] <= 0

    return FalsifyResult(
        success=success,
        falsifying_input=trace if success else None,
        iterations_used=len(history),
        robustness_history=history,
        wall_time=time.perf_counter() - started,
    )


def _resolve(problem: Problem | CatalogueReference) -> Problem:
    if isinstance(problem, CatalogueReference):
        return catalogue_problem(problem.catalogue, problem.T)

    return problem


def run_experiment(
    problems: Sequence[Problem | CatalogueReference], trials: int, seeds: Sequence[int] = None,
    optimizer: OptimizerConfig = None,
) -> ExperimentReport:
    """Falsify the plain and refined specification of every problem with paired seeds.

    Raises:
        ConfigurationError: If fewer seeds than trials are given.
    """

    if trials == 0:
        return ExperimentReport()

    seeds = list(range(trials)) if seeds is None else list(seeds)

    if len(seeds) < trials:
        raise ConfigurationError(f"{trials} trials need at least as many seeds, got {len(seeds)}")

    optimizer = optimizer or OptimizerConfig()
    reports = []

    for problem in map(_resolve, problems):
        model = build_model(problem.model, problem.model_parameters)
        plain = parse(problem.plain)
        refined = parse(problem.refined) if problem.refined else plain
        plain_results, refined_results = [], []
        reverified = 0

        for trial, seed in enumerate(seeds[:trials], start=1):
            opt = optimizer.model_copy(update={"seed": seed})
            plain_results.append(falsification_loop(model, plain, problem.input_spec, opt))
            refined_result = falsification_loop(model, refined, problem.input_spec, opt)
            refined_results.append(refined_result)

            if refined_result.success:
                output = simulate(model, refined_result.falsifying_input, problem.input_spec.horizon)

                if evaluate(output, plain).pos <= 0:
                    reverified += 1

            logging.info(
                f"{problem.name} trial {trial}/{trials} (seed {seed}): plain "
                f"{plain_results[-1].iterations_used} iterations, refined {refined_result.iterations_used}")

        reports.append(ProblemReport(
            problem=problem.name,
            plain_formula=unparse(plain),
            refined_formula=unparse(refined),
            plain=VariantSummary.from_results(plain_results),
            refined=VariantSummary.from_results(refined_results),
            reverified=reverified,
            plain_iterations=[r.iterations_used for r in plain_results],
            refined_iterations=[r.iterations_used for r in refined_results],
        ))

    return ExperimentReport(problems=reports)


def load_experiment_config(path: str | Path) -> ExperimentConfig:
    """Read an experiment file.

    Raises:
        ConfigurationError: If the file is not a valid experiment description.
    """

    try:
        return ExperimentConfig.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except ValidationError as e:
        raise ConfigurationError(f"{path}: {e}") from e
