"""Seeded random traces and formulas for cross-checks and benchmarks.

Timestamps, interval bounds and thresholds are drawn from coarse binary
grids so that shifted breakpoints coincide often, which is where
off-by-one-breakpoint mistakes show up.
"""

import numpy as np

from .models.formulas import (
    Always, And, Atom, Eventually, FalseFormula, Formula, Implies, Interval, Not, Or, Release, TrueFormula,
    Until, proposition,
)
from .models.signals import FPCSignal, Trace

__all__ = (
    "REAL_VARIABLES",
    "PROPOSITIONS",
    "random_signal",
    "random_trace",
    "random_formula",
    "random_instance",
    "sample_times",
)

REAL_VARIABLES = ("x", "y")
PROPOSITIONS = ("p",)

_TIME_GRID = 0.125
_VALUE_RANGE = (-5.0, 5.0)


def random_signal(
    rng: np.random.Generator, segments: int, horizon: float, low: float = _VALUE_RANGE[0],
    high: float = _VALUE_RANGE[1], levels: tuple[float, ...] = None, grid: float | None = _TIME_GRID,
) -> FPCSignal:
    """Piecewise-constant signal with at most ``segments`` steps before ``horizon``.

    Args:
        levels: Draw values from these levels instead of ``[low, high]``.
        grid: Snap breakpoints to multiples of this step; None keeps them continuous.
    """

    inner = rng.uniform(0.0, horizon, size=max(segments - 1, 0))

    if grid:
        inner = np.round(inner / grid) * grid

    times = np.unique(np.concatenate(([0.0], inner[inner > 0])))

    if levels:
        values = rng.choice(levels, size=len(times))
    else:
        values = np.round(rng.uniform(low, high, size=len(times)), 2)

    return FPCSignal.from_steps(times.tolist(), values.tolist())


def random_trace(
    rng: np.random.Generator, max_segments: int = 50, horizon: float = 10.0,
    variables: tuple[str, ...] = REAL_VARIABLES, propositions: tuple[str, ...] = PROPOSITIONS,
) -> Trace:
    """Trace over real-valued ``variables`` and +1/-1 ``propositions``."""

    channels = {}

    for name in variables:
        channels[name] = random_signal(rng, int(rng.integers(1, max_segments + 1)), horizon)

    for name in propositions:
        channels[name] = random_signal(rng, int(rng.integers(1, max_segments + 1)), horizon, levels=(-1.0, 1.0))

    return Trace(channels=channels)


def _interval(rng: np.random.Generator, unbounded: bool) -> Interval:
    lo = float(rng.integers(0, 7)) * 0.5

    if unbounded and rng.random() < 0.1:
        return Interval(lo=lo)

    return Interval(lo=lo, hi=lo + float(rng.integers(1, 7)) * 0.5)


def _atom(rng: np.random.Generator, variables: tuple[str, ...], propositions: tuple[str, ...]) -> Atom:
    if propositions and rng.random() < 0.25:
        return proposition(str(rng.choice(propositions)))

    relation = str(rng.choice(["<", "<=", ">=", ">"]))
    threshold = float(np.round(rng.uniform(*_VALUE_RANGE), 1))

    return Atom(variable=str(rng.choice(variables)), relation=relation, threshold=threshold)


def random_formula(
    rng: np.random.Generator, max_depth: int = 4, averaged: bool = True,
    variables: tuple[str, ...] = REAL_VARIABLES, propositions: tuple[str, ...] = PROPOSITIONS,
    constants: bool = True,
) -> Formula:
    """Random formula with at most ``max_depth`` operators on any root-to-leaf path.

    Averaged operators, when allowed, may sit anywhere in the tree, under
    plain temporal operators and in until/release operands included, but
    never inside one another. Constants are kept out of averaged operands.
    """

    if max_depth <= 0 or rng.random() < 0.2:
        if constants and rng.random() < 0.05:
            return TrueFormula() if rng.random() < 0.5 else FalseFormula()

        return _atom(rng, variables, propositions)

    def sub(**overrides) -> Formula:
        options = {"max_depth": max_depth - 1, "averaged": averaged, "variables": variables,
                   "propositions": propositions, "constants": constants} | overrides

        return random_formula(rng, **options)

    kind = int(rng.integers(0, 8))

    match kind:
        case 0:
            return Not(operand=sub())
        case 1:
            return And(left=sub(), right=sub())
        case 2:
            return Or(left=sub(), right=sub())
        case 3:
            return Implies(left=sub(), right=sub())

    is_averaged = averaged and rng.random() < 0.4
    interval = _interval(rng, unbounded=not is_averaged)
    nested = {"averaged": averaged and not is_averaged, "constants": constants and not is_averaged}

    match kind:
        case 4:
            return Eventually(interval=interval, operand=sub(**nested), is_averaged=is_averaged)
        case 5:
            return Always(interval=interval, operand=sub(**nested), is_averaged=is_averaged)
        case 6:
            return Until(interval=interval, left=sub(**nested), right=sub(**nested), is_averaged=is_averaged)

    return Release(interval=interval, left=sub(**nested), right=sub(**nested), is_averaged=is_averaged)


def random_instance(rng: np.random.Generator, max_depth: int = 4, max_segments: int = 50) -> tuple[Trace, Formula]:
    trace = random_trace(rng, max_segments=max_segments)

    return trace, random_formula(rng, max_depth=max_depth)


def sample_times(rng: np.random.Generator, trace: Trace, count: int) -> list[float]:
    """Random instants over the trace, a third of them on breakpoints."""

    breakpoints = trace.breakpoints
    horizon = max(trace.horizon, 1.0)
    times = []

    for _ in range(count):
        if rng.random() < 1 / 3:
            times.append(float(rng.choice(breakpoints)))
        else:
            times.append(float(rng.uniform(0.0, horizon + 1.0)))

    return times
