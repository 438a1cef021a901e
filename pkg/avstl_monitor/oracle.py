"""Brute-force reference semantics.

Values are computed pointwise, straight from the quantitative semantics:
suprema and infima are taken over an explicit finite set of candidate
instants, and averages are integrated numerically on grids that are halved
until they converge. Nothing here shares code with the window kernels, so
the two implementations can check each other.
"""

import logging
import math
from bisect import bisect_left, bisect_right
from itertools import accumulate
from typing import Callable, Sequence

from .exceptions import EvaluationError, MonitorException, OracleError, UnknownVariable, UnsupportedFormula
from .models.formulas import (
    Always, And, Atom, Eventually, FalseFormula, Formula, Implies, Not, Or, Release, TrueFormula, Until,
    averaged_depth, replace_at, variables,
)
from .models.oracle import OracleConfig
from .models.robustness import Channel, RobustnessPair
from .models.signals import FPCSignal, Trace
from .robustness import robust_signal

__all__ = (
    "oracle_evaluate",
    "oracle_robust_signal_samples",
    "agrees",
    "cross_check",
    "minimize_counterexample",
)

type _Function = Callable[[float], float]

_TEMPORAL = (Eventually, Always, Until, Release)


def _opposite(channel: Channel) -> Channel:
    return Channel.NEG if channel == Channel.POS else Channel.POS


def _core(formula: Formula) -> Formula:
    if isinstance(formula, Implies):
        formula = formula.desugar()

    if not formula.children:
        return formula

    return formula.with_children(*(_core(child) for child in formula.children))


def _is_integral(node: Formula) -> bool:
    return isinstance(node, _TEMPORAL) and node.is_averaged and node.interval.bounded


def _left_limit(fn: _Function, previous: float, point: float) -> float:
    """Limit of ``fn`` at ``point`` from the left, ``fn`` being linear on ``(previous, point)``."""

    width = point - previous
    near, far = fn(previous + 0.75 * width), fn(previous + 0.5 * width)

    if math.isinf(near) or math.isinf(far):
        return near

    return near + (near - far)


def _crossings(first: _Function, second: _Function, lo: float, hi: float) -> list[float]:
    """Where two functions that are linear on ``(lo, hi)`` meet inside it."""

    q1, q2 = lo + (hi - lo) / 3, lo + 2 * (hi - lo) / 3
    d1, d2 = first(q1) - second(q1), first(q2) - second(q2)

    if not (math.isfinite(d1) and math.isfinite(d2)) or d1 == d2:
        return []

    root = q1 + d1 * (q2 - q1) / (d1 - d2)

    return [root] if lo < root < hi else []


class _Oracle:
    """Memoized pointwise evaluation of one formula over one trace."""

    def __init__(self, trace: Trace, config: OracleConfig):
        self.trace = trace
        self.config = config
        self._candidates: dict[int, tuple[float, ...]] = {}
        self._constant: dict[int, bool] = {}
        self._values: dict[tuple[int, float, Channel], float] = {}

    def is_piecewise_constant(self, node: Formula) -> bool:
        key = id(node)

        if key not in self._constant:
            self._constant[key] = not _is_integral(node) and all(
                self.is_piecewise_constant(child) for child in node.children)

        return self._constant[key]

    def candidates(self, node: Formula) -> tuple[float, ...]:
        """Instants containing every breakpoint of the node's robustness signals."""

        key = id(node)

        if key not in self._candidates:
            self._candidates[key] = tuple(sorted(self._collect(node)))

        return self._candidates[key]

    def _collect(self, node: Formula) -> set[float]:
        match node:
            case TrueFormula() | FalseFormula():
                return {0.0}
            case Atom():
                return set(self.trace[node.variable].times)
            case Not():
                return set(self.candidates(node.operand))
            case And() | Or():
                found = set(self.candidates(node.left)) | set(self.candidates(node.right))

                if not self.is_piecewise_constant(node):
                    found |= self._kinks(sorted(found), lambda channel, lo, hi: [
                        self._function(node.left, channel), self._function(node.right, channel)])

                return found
            case Eventually() | Always():
                found = self._shifted(self.candidates(node.operand), (node.interval.lo, node.interval.hi))

                if not self.is_piecewise_constant(node.operand):
                    found |= self._kinks(sorted(found), lambda channel, lo, hi: self._window_parts(node, channel, lo, hi))

                return found
            case Until() | Release():
                points = self.candidates(node.left) + self.candidates(node.right)
                found = self._shifted(points, (0.0, node.interval.lo, node.interval.hi))

                if not self._constant_operands(node):
                    found |= self._until_kinks(node, sorted(found))

                return found

        raise UnsupportedFormula(f"cannot evaluate {type(node).__name__}")

    @staticmethod
    def _shifted(points: Sequence[float], offsets: Sequence[float]) -> set[float]:
        return {0.0} | {p - d for p in points for d in offsets if math.isfinite(d) and p - d >= 0}

    def _kinks(self, points: list[float], parts: Callable[[Channel, float, float], list[_Function]]) -> set[float]:
        """Crossings of the linear pieces a node's value is the extremum of, cell by cell."""

        found = set()

        for lo, hi in zip(points, points[1:]):
            for channel in Channel:
                functions = parts(channel, lo, hi)

                for index, first in enumerate(functions):
                    for second in functions[index + 1:]:
                        found.update(_crossings(first, second, lo, hi))

        return found

    def _window_parts(self, node: Eventually | Always, channel: Channel, lo: float, hi: float) -> list[_Function]:
        a, b = node.interval.lo, node.interval.hi
        operand = node.operand
        mid = (lo + hi) / 2
        parts = [lambda t: self.value(operand, t + a, channel)]

        if node.interval.bounded:
            parts.append(lambda t: self.value(operand, t + b, channel))

        inner = self._window_values(operand, channel, mid + a, self._window_end(operand, mid, a, b), ends=False)

        if inner:
            level = (max if isinstance(node, Eventually) else min)(inner)
            parts.append(lambda t: level)

        return parts

    def _constant_operands(self, node: Until | Release) -> bool:
        return self.is_piecewise_constant(node.left) and self.is_piecewise_constant(node.right)

    def _until_end(self, node: Until | Release, t: float) -> float:
        if node.interval.bounded:
            return t + node.interval.hi

        return max(t + node.interval.lo, self.candidates(node.left)[-1], self.candidates(node.right)[-1]) + 1.0

    def _until_kinks(self, node: Until | Release, points: list[float]) -> set[float]:
        """Crossings of the lines an until over sloped operands is built from.

        On a cell the value is a lattice combination of the operands read at
        ``t``, ``t + a`` and ``t + b``, and of levels fixed by witnesses that do
        not move with ``t``. The lines are crossed with each other and with
        every level.
        """

        a, b = node.interval.lo, node.interval.hi
        offsets = (a, b) if node.interval.bounded else (a,)
        found = set()

        for lo, hi in zip(points, points[1:]):
            for channel in Channel:
                lines = [self._function(node.left, channel)]

                for d in offsets:
                    lines.append(lambda t, d=d: self.value(node.right, t + d, channel))
                    lines.append(lambda t, d=d: self.value(node.left, t + d, channel))

                end = self._until_end(node, hi)
                levels = {term for t in (lo, hi) for _, term in self._terms(node, t, channel)}
                levels.update(self._window_values(node.left, channel, lo, end, ends=False))
                levels.update(self._window_values(node.right, channel, lo + a, end, ends=False))
                flat = [lambda t, level=level: level for level in levels if math.isfinite(level)]

                for index, first in enumerate(lines):
                    for second in lines[index + 1:] + flat:
                        found.update(_crossings(first, second, lo, hi))

        return found

    def _function(self, node: Formula, channel: Channel) -> _Function:
        return lambda t: self.value(node, t, channel)

    def _window_end(self, node: Formula, t: float, a: float, b: float) -> float:
        if math.isfinite(b):
            return t + b

        return max(t + a, self.candidates(node)[-1]) + 1.0

    def _window_values(self, node: Formula, channel: Channel, lo: float, hi: float, ends: bool = True) -> list[float]:
        """Every value the supremum or infimum of ``node`` over ``[lo, hi]`` can take."""

        points = self.candidates(node)
        interior = points[bisect_right(points, lo):bisect_left(points, hi)]
        fn = self._function(node, channel)
        found = [fn(lo), fn(hi)] if ends else []
        previous = lo
        constant = self.is_piecewise_constant(node)

        for point in interior:
            found.append(fn(point))

            if not constant:
                found.append(_left_limit(fn, previous, point))

            previous = point

        if ends and not constant:
            found.append(_left_limit(fn, previous, hi))

        return found

    def value(self, node: Formula, t: float, channel: Channel) -> float:
        key = (id(node), t, channel)

        if key not in self._values:
            self._values[key] = self._compute(node, t, channel)

        return self._values[key]

    def _compute(self, node: Formula, t: float, channel: Channel) -> float:
        positive = channel == Channel.POS

        match node:
            case TrueFormula():
                return math.inf if positive else 0.0
            case FalseFormula():
                return 0.0 if positive else -math.inf
            case Atom():
                x = self.trace[node.variable].value_at(t)
                margin = x - node.threshold if node.lower_bound else node.threshold - x

                return max(margin, 0.0) if positive else min(margin, 0.0)
            case Not():
                return -self.value(node.operand, t, _opposite(channel)) + 0.0
            case And():
                return min(self.value(node.left, t, channel), self.value(node.right, t, channel))
            case Or():
                return max(self.value(node.left, t, channel), self.value(node.right, t, channel))
            case Eventually() | Always() if not _is_integral(node):
                a, b = node.interval.lo, node.interval.hi
                values = self._window_values(node.operand, channel, t + a, self._window_end(node.operand, t, a, b))

                return max(values) if isinstance(node, Eventually) else min(values)
            case Eventually() | Always() | Until() | Release():
                looser = max if isinstance(node, (Eventually, Until)) else min
                terms = self._terms(node, t, channel)

                if _is_integral(node):
                    return self._average(node, t, terms, looser)

                return looser(term for _, term in terms)

        raise UnsupportedFormula(f"cannot evaluate {type(node).__name__}")

    def _terms(self, node: Formula, t: float, channel: Channel) -> list[tuple[float, float]]:
        """``(x, value)`` for every instant ``x`` a witness of the operator can sit at.

        For until the value is ``min(right(x), inf of left on [t, x))``, for
        release ``max(right(x), sup of left on [t, x))``. At ``x = t + a`` with
        ``a > 0`` the prefix is closed, which gives the right limit in ``t``.

        Sloped operands add the left limits at every instant and, inside each
        cell, the points where the right operand, the left operand and the
        prefix cross.
        """

        if isinstance(node, (Until, Release)):
            left, right = node.left, node.right
            linear = not self._constant_operands(node)
        else:
            left, right = None, node.operand
            linear = False

        tighter = min if isinstance(node, (Eventually, Until)) else max
        neutral = math.inf if tighter is min else -math.inf
        a, b = node.interval.lo, node.interval.hi
        lo = t + a
        points = set(self.candidates(right)) | (set(self.candidates(left)) if left is not None else set())
        hi = self._until_end(node, t) if left is not None else t + b
        xs = [lo] + [x for x in sorted(points) if lo < x < hi] + [hi]

        prefix = neutral

        if left is not None:
            inner = [y for y in self.candidates(left) if t < y < lo]
            prefix = tighter([self.value(left, t, channel)] + [self.value(left, y, channel) for y in inner])

            if linear:
                stops = [t, *inner, lo]
                left_fn = self._function(left, channel)
                prefix = tighter([prefix] + [_left_limit(left_fn, p, q) for p, q in zip(stops, stops[1:]) if q > p])

        terms = []
        right_fn = self._function(right, channel)

        for index, x in enumerate(xs):
            if linear and index > 0:
                previous, level = xs[index - 1], prefix
                lines = [right_fn, left_fn, lambda _: level]

                for position, first in enumerate(lines):
                    for second in lines[position + 1:]:
                        for c in _crossings(first, second, previous, x):
                            terms.append((c, tighter(right_fn(c), level, left_fn(c))))

                prefix = tighter(prefix, _left_limit(left_fn, previous, x))
                terms.append((x, tighter(_left_limit(right_fn, previous, x), prefix)))

            if left is None:
                guard = neutral
            elif index == 0:
                guard = tighter(prefix, self.value(left, lo, channel)) if a > 0 else neutral
            else:
                guard = prefix

            terms.append((x, tighter(self.value(right, x, channel), guard)))

            if left is not None:
                prefix = tighter(prefix, self.value(left, x, channel))

        return terms

    def _average(self, node: Formula, t: float, terms: list[tuple[float, float]], looser) -> float:
        """Composite midpoint rule over the event cells of ``tau``, refined until it settles."""

        a, b = node.interval.lo, node.interval.hi
        xs = [x for x, _ in terms]
        running = list(accumulate((term for _, term in terms), looser))
        events = sorted({a, b} | {x - t for x in xs if a < x - t < b})
        cells = list(zip(events, events[1:]))

        def integrand(tau: float) -> float:
            return running[bisect_right(xs, t + tau) - 1]

        coarse = [integrand((lo + hi) / 2) for lo, hi in cells]

        if any(math.isinf(value) for value in coarse):
            if len(set(coarse)) > 1:
                raise EvaluationError(f"cannot average over [{a}, {b}]: the window mixes finite and infinite values")

            return coarse[0]

        previous = None

        for level in range(self.config.integration_refinements + 1):
            pieces = 2 ** level
            total = 0.0

            for lo, hi in cells:
                width = (hi - lo) / pieces
                total += width * sum(integrand(lo + (k + 0.5) * width) for k in range(pieces))

            average = total / (b - a)

            if previous is not None and abs(average - previous) < self.config.abs_tolerance:
                return average

            previous = average

        raise OracleError(
            f"average over [{a}, {b}] at t={t} did not converge after {self.config.integration_refinements} refinements")


def _check(trace: Trace, formula: Formula):
    if averaged_depth(formula) > 1:
        raise UnsupportedFormula("averaged operators cannot be nested")

    missing = variables(formula) - trace.variables

    if missing:
        raise UnknownVariable(f"trace has no channel for {', '.join(sorted(missing))}")


def oracle_evaluate(trace: Trace, formula: Formula, config: OracleConfig = None) -> RobustnessPair:
    """Positive and negative robustness at time 0, by brute force.

    Raises:
        OracleError: If an average does not converge.
    """

    _check(trace, formula)

    core = _core(formula)
    oracle = _Oracle(trace, config or OracleConfig())

    return RobustnessPair(pos=oracle.value(core, 0.0, Channel.POS), neg=oracle.value(core, 0.0, Channel.NEG))


def oracle_robust_signal_samples(
    trace: Trace, formula: Formula, sample_times: Sequence[float], config: OracleConfig = None
) -> list[RobustnessPair]:
    """Robustness at each sample time, evaluated on the correspondingly shifted trace."""

    return [oracle_evaluate(trace.shift(t), formula, config) for t in sample_times]


def agrees(first: RobustnessPair, second: RobustnessPair, tolerance: float) -> bool:
    def close(x: float, y: float) -> bool:
        if math.isinf(x) or math.isinf(y):
            return x == y

        return math.isclose(x, y, rel_tol=tolerance, abs_tol=tolerance)

    return close(first.pos, second.pos) and close(first.neg, second.neg)


def cross_check(
    trace: Trace, formula: Formula, sample_times: Sequence[float] = (0.0,), config: OracleConfig = None
) -> str | None:
    """Compare the engine with the oracle; describe the first disagreement, if any.

    Both sides raising the same kind of error counts as agreement.
    """

    tolerance = 1e-6 if averaged_depth(formula) else 1e-9

    try:
        signal = robust_signal(trace, formula)
        engine = [signal.at(t) for t in sample_times]
    except MonitorException as e:
        engine = e

    try:
        reference = oracle_robust_signal_samples(trace, formula, sample_times, config)
    except MonitorException as e:
        reference = e

    if isinstance(engine, Exception) or isinstance(reference, Exception):
        if type(engine) is type(reference):
            return None

        return f"engine gave {engine!r}, oracle gave {reference!r}"

    for t, ours, theirs in zip(sample_times, engine, reference):
        if not agrees(ours, theirs, tolerance):
            return f"at t={t!r}: engine {ours.pos!r}/{ours.neg!r}, oracle {theirs.pos!r}/{theirs.neg!r}"

    return None


def _smaller_traces(trace: Trace, formula: Formula):
    used = variables(formula)

    for name, channel in trace.channels.items():
        if name not in used and len(trace.channels) > 1:
            yield Trace(channels={other: c for other, c in trace.channels.items() if other != name})

        for index in range(1, len(channel)):
            times = channel.times[:index] + channel.times[index + 1:]
            values = channel.values[:index] + channel.values[index + 1:]

            yield Trace(channels={**trace.channels, name: FPCSignal.from_steps(times, values)})


def _smaller_formulas(formula: Formula):
    for path, node in formula.walk():
        for child in node.children:
            yield replace_at(formula, path, child)


def minimize_counterexample(
    trace: Trace, formula: Formula, failing: Callable[[Trace, Formula], bool]
) -> tuple[Trace, Formula]:
    """Greedily shrink a failing instance while ``failing`` keeps holding."""

    changed = True

    while changed:
        changed = False

        for candidate in _smaller_formulas(formula):
            if variables(candidate) <= trace.variables and failing(trace, candidate):
                formula, changed = candidate, True
                break

        for candidate in _smaller_traces(trace, formula):
            if failing(candidate, formula):
                trace, changed = candidate, True
                break

    logging.debug(f"Minimized counterexample to {formula} over {len(trace)} segments")

    return trace, formula
