"""Positive and negative robust semantics of averaged signal temporal logic.

Both robustness channels are computed as whole signals by structural
recursion over the formula. Temporal operators run the linear-time window
kernels of :mod:`avstl_monitor.windows`; release is derived from until by
negating both operands and both channels.

Robustness signals are the right-continuous representatives of the
pointwise semantics: at a breakpoint the value is the right limit.
"""

import logging
import math

from .exceptions import EvaluationError, UnknownVariable, UnsupportedFormula
from .models.formulas import (
    Always, And, Atom, Eventually, FalseFormula, Formula, Implies, Interval, Not, Or, Release, TrueFormula,
    Until, averaged_depth, variables,
)
from .models.robustness import Channel, RobustnessPair, RobustnessSignal
from .models.signals import ClampMode, FPLSignal, LatticeOp, Trace
from .windows import averaged_window, running_extremum, sliding_window

__all__ = (
    "evaluate",
    "robust_signal",
    "avg_eventually",
    "untimed_until",
    "until_guard",
    "bounded_until",
    "avg_until",
    "release_via_duality",
)

_TOP = RobustnessSignal(pos=FPLSignal.constant(math.inf), neg=FPLSignal.constant(0.0))
_BOTTOM = RobustnessSignal(pos=FPLSignal.constant(0.0), neg=FPLSignal.constant(-math.inf))

# averaged signals can land a hair on the wrong side of zero
_SIGN_SLACK = 1e-9


def _check_channel(signal: FPLSignal, channel: Channel):
    if channel == Channel.POS:
        bad = any(v < -_SIGN_SLACK for v in signal.values)
    else:
        bad = any(v > _SIGN_SLACK for v in signal.values)

    if bad:
        raise EvaluationError(f"signal has the wrong sign for the {channel} channel")


def _merged_steps(s1: FPLSignal, s2: FPLSignal) -> tuple[list[float], list[float], list[float]]:
    """Common breakpoints of two step functions with both values on each step."""

    times, first, second = [], [], []
    i = j = 0

    while True:
        times.append(max(s1.times[i], s2.times[j]))
        first.append(s1.values[i])
        second.append(s2.values[j])

        next_i = s1.times[i + 1] if i + 1 < len(s1) else math.inf
        next_j = s2.times[j + 1] if j + 1 < len(s2) else math.inf

        if math.isinf(next_i) and math.isinf(next_j):
            return times, first, second

        if next_i <= next_j:
            i += 1

        if next_j <= next_i:
            j += 1


def _local(signal: FPLSignal, t0: float) -> FPLSignal:
    """The line through ``signal`` on the segment at ``t0``, in time relative to ``t0``."""

    return FPLSignal._build([0.0], [signal.value_at(t0)], [signal.slopes[signal.segment_index(t0)]])


def _linear_until(s1: FPLSignal, s2: FPLSignal) -> FPLSignal:
    """Backward pass of :func:`untimed_until` over piecewise-linear operands.

    On a common segment ``[t0, t1)`` both operands are lines. With ``C`` the
    result at ``t1`` the result there is
    ``max(s2, min(s1, max(M, min(s1(t1-), C))))``, where ``M(t)`` is the
    supremum of ``min(s1, s2)`` over ``[t, t1)``. On the last segment the
    carried term is absent.
    """

    times = sorted(set(s1.times) | set(s2.times))
    pieces: list[tuple[float, float, float]] = []
    carry = None

    for index in range(len(times) - 1, -1, -1):
        t0 = times[index]
        first, second = _local(s1, t0), _local(s2, t0)
        meet = first.pointwise(second, LatticeOp.MIN)

        if carry is None:
            width = math.inf
            reach = running_extremum(meet, LatticeOp.MAX)
        else:
            width = times[index + 1] - t0
            kept = [(t, v, q) for t, v, q in meet.segments if t < width]
            held = FPLSignal._build(
                [t for t, _, _ in kept] + [width],
                [v for _, v, _ in kept] + [meet.left_limit(width)],
                [q for _, _, q in kept] + [0.0],
            )
            tail = FPLSignal.constant(min(s1.left_limit(times[index + 1]), carry))
            reach = running_extremum(held, LatticeOp.MAX).pointwise(tail, LatticeOp.MAX)

        local = second.pointwise(first.pointwise(reach, LatticeOp.MIN), LatticeOp.MAX)
        carry = local.values[0]
        pieces.extend(reversed([(t0 + t, v, q) for t, v, q in local.segments if t < width]))

    pieces.reverse()

    return FPLSignal._build([t for t, _, _ in pieces], [v for _, v, _ in pieces], [q for _, _, q in pieces])


def untimed_until(s1: FPLSignal, s2: FPLSignal, channel: Channel = Channel.POS) -> FPLSignal:
    """``t -> sup over x >= t of min(s2(x), inf of s1 on [t, x))``, one backward pass.

    Step functions take a fast path over their common steps; operands with
    slopes are split where the two lines cross.
    """

    _check_channel(s1, channel)
    _check_channel(s2, channel)

    if not (s1.is_piecewise_constant and s2.is_piecewise_constant):
        return _linear_until(s1, s2)

    times, first, second = _merged_steps(s1, s2)
    result = [0.0] * len(times)
    carry = second[-1]
    result[-1] = carry

    for index in range(len(times) - 2, -1, -1):
        carry = max(second[index], min(first[index], carry))
        result[index] = carry

    return FPLSignal._build(times, result, [0.0] * len(times))


def until_guard(s1: FPLSignal, s2: FPLSignal, a: float, channel: Channel = Channel.POS) -> FPLSignal:
    """``t -> min(inf of s1 on [t, t+a], untimed until at t+a)``.

    Capping ``F[a,b] s2`` by this guard yields ``s1 U[a,b] s2``; capping
    every ``F[a,tau] s2`` by it yields the integrand of the averaged until.
    """

    guard = untimed_until(s1, s2, channel).shift(a)

    if a > 0:
        guard = guard.pointwise(sliding_window(s1, 0.0, a, LatticeOp.MIN), LatticeOp.MIN)

    return guard


def bounded_until(s1: FPLSignal, s2: FPLSignal, a: float, b: float, channel: Channel = Channel.POS) -> FPLSignal:
    """Until over ``[a, b]``, possibly with ``b = inf``."""

    guard = until_guard(s1, s2, a, channel)

    if math.isinf(b):
        return guard

    return sliding_window(s2, a, b, LatticeOp.MAX).pointwise(guard, LatticeOp.MIN)


def avg_eventually(s: FPLSignal, a: float, b: float) -> FPLSignal:
    """``t -> 1/(b-a) * integral over tau in [a,b] of (sup of s on [t+a, t+tau])``."""

    return averaged_window(s, a, b)


def avg_until(phi2_sig: FPLSignal, g: FPLSignal, a: float, b: float) -> FPLSignal:
    """Averaged until from the right operand signal and the guard of :func:`until_guard`."""

    return averaged_window(phi2_sig, a, b, guard=g)


def _until(s1: FPLSignal, s2: FPLSignal, interval: Interval, averaged: bool, channel: Channel) -> FPLSignal:
    if averaged and interval.bounded:
        return avg_until(s2, until_guard(s1, s2, interval.lo, channel), interval.lo, interval.hi)

    return bounded_until(s1, s2, interval.lo, interval.hi, channel)


def release_via_duality(
    s1: FPLSignal, s2: FPLSignal, interval: Interval, averaged: bool = False, channel: Channel = Channel.POS
) -> FPLSignal:
    """(Averaged) release on one channel, as the negated until of the negated operands on the other."""

    opposite = Channel.NEG if channel == Channel.POS else Channel.POS

    return _until(s1.negate(), s2.negate(), interval, averaged, opposite).negate()


class _Evaluator:
    """Structural recursion producing robustness signals for one trace."""

    def __init__(self, trace: Trace):
        self.trace = trace

    def visit(self, formula: Formula) -> RobustnessSignal:
        match formula:
            case TrueFormula():
                return _TOP
            case FalseFormula():
                return _BOTTOM
            case Atom():
                return self._atom(formula)
            case Not():
                inner = self.visit(formula.operand)

                return RobustnessSignal(pos=inner.neg.negate(), neg=inner.pos.negate())
            case And() | Or():
                op = LatticeOp.MIN if isinstance(formula, And) else LatticeOp.MAX
                left, right = self.visit(formula.left), self.visit(formula.right)

                return RobustnessSignal(pos=left.pos.pointwise(right.pos, op), neg=left.neg.pointwise(right.neg, op))
            case Implies():
                return self.visit(formula.desugar())
            case Eventually() | Always():
                return self._unary_temporal(formula)
            case Until() | Release():
                return self._binary_temporal(formula)

        raise UnsupportedFormula(f"cannot evaluate {type(formula).__name__}")

    def _atom(self, atom: Atom) -> RobustnessSignal:
        channel = self.trace[atom.variable]
        sign = 1.0 if atom.lower_bound else -1.0
        margin = FPLSignal._build(
            channel.times,
            [sign * (value - atom.threshold) for value in channel.values],
            channel.slopes,
        )

        return RobustnessSignal(pos=margin.clamp(ClampMode.NONNEG), neg=margin.clamp(ClampMode.NONPOS))

    def _unary_temporal(self, formula: Eventually | Always) -> RobustnessSignal:
        inner = self.visit(formula.operand)
        interval = formula.interval
        mode = LatticeOp.MAX if isinstance(formula, Eventually) else LatticeOp.MIN

        def apply(signal: FPLSignal) -> FPLSignal:
            if not interval.bounded:
                return running_extremum(signal, mode).shift(interval.lo)

            if not formula.is_averaged:
                return sliding_window(signal, interval.lo, interval.hi, mode)

            if mode == LatticeOp.MAX:
                return avg_eventually(signal, interval.lo, interval.hi)

            return avg_eventually(signal.negate(), interval.lo, interval.hi).negate()

        logging.debug(f"Evaluating {type(formula).__name__}{interval} (averaged={formula.is_averaged})")

        return RobustnessSignal(pos=apply(inner.pos), neg=apply(inner.neg))

    def _binary_temporal(self, formula: Until | Release) -> RobustnessSignal:
        left, right = self.visit(formula.left), self.visit(formula.right)

        if isinstance(formula, Until):
            compute = _until
        else:
            compute = release_via_duality

        return RobustnessSignal(
            pos=compute(left.pos, right.pos, formula.interval, formula.is_averaged, Channel.POS),
            neg=compute(left.neg, right.neg, formula.interval, formula.is_averaged, Channel.NEG),
        )


def _check_evaluable(trace: Trace, formula: Formula):
    depth = averaged_depth(formula)

    if depth > 1:
        raise UnsupportedFormula(f"averaged operators are nested {depth} deep; at most one level is supported")

    missing = variables(formula) - trace.variables

    if missing:
        raise UnknownVariable(f"trace has no channel for {', '.join(sorted(missing))}")


def robust_signal(trace: Trace, formula: Formula) -> RobustnessSignal:
    """Positive and negative robustness signals of ``formula`` over ``trace``.

    Raises:
        UnknownVariable: If the formula reads a variable the trace lacks.
        UnsupportedFormula: If averaged operators are nested.
        EvaluationError: If an average is taken over a partly infinite window.
    """

    _check_evaluable(trace, formula)

    return _Evaluator(trace).visit(formula)


def evaluate(trace: Trace, formula: Formula) -> RobustnessPair:
    """Positive and negative robustness of ``formula`` over ``trace`` at time 0."""

    return robust_signal(trace, formula).at(0.0)
