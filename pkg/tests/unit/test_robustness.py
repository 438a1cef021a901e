import math

import pytest
from pytest_lazy_fixtures import lf

from avstl_monitor.exceptions import EvaluationError, UnknownVariable, UnsupportedFormula
from avstl_monitor.generators import random_formula, random_signal, random_trace, sample_times
from avstl_monitor.models.formulas import (
    Eventually, Formula, Interval, Not, Or, Release, TrueFormula, Until, is_positive_position, replace_at,
)
from avstl_monitor.models.robustness import Channel
from avstl_monitor.models.signals import FPCSignal, FPLSignal, LatticeOp, Trace
from avstl_monitor.parser import parse
from avstl_monitor.robustness import (
    _linear_until, avg_eventually, avg_until, bounded_until, evaluate, release_via_duality, robust_signal,
    until_guard, untimed_until,
)
from avstl_monitor.windows import running_extremum, sliding_window

# fixtures
from .fixtures.formulas import airbag_deadline, expeditious_airbag
from .fixtures.traces import airbag_trace, braking_trace, mixed_trace, slow_speed_trace, speed_trace


def _strip_averaging(formula: Formula) -> Formula:
    for path, node in formula.walk():
        if node.averaged:
            return _strip_averaging(replace_at(formula, path, node.model_copy(update={"is_averaged": False})))

    return formula


def _same_values(first: FPLSignal, second: FPLSignal, horizon: float) -> bool:
    points = sorted(set(first.times) | set(second.times) | {horizon + 1.0})

    return all(first.value_at(t) == pytest.approx(second.value_at(t), abs=1e-9) for t in points)


def _random_interval(rng, unbounded: bool = False) -> Interval:
    lo = float(rng.integers(0, 5)) * 0.5

    if unbounded and rng.random() < 0.2:
        return Interval(lo=lo)

    return Interval(lo=lo, hi=lo + float(rng.integers(1, 7)) * 0.5)


class TestEvaluate:
    """Tests related to robustness at time 0."""

    @pytest.mark.parametrize("trace,formula,pos,neg", [
        (lf("speed_trace"), "F[0,10] v >= 80", 20, 0),
        (lf("slow_speed_trace"), "F[0,10] v >= 80", 0, -30),
        (lf("speed_trace"), "G[0,10] v <= 50", 0, -50),
        (lf("speed_trace"), "true", math.inf, 0),
        (lf("speed_trace"), "false", 0, -math.inf),
        (lf("speed_trace"), "v > 80 -> v < 120", 20, 0),
        (lf("airbag_trace"), "AvF[0,1] airbag", 0.5, -0.5),
        (lf("airbag_trace"), "AvG[0,1] airbag", 0, -1),
        (lf("airbag_trace"), "AvF[0,inf) airbag", 1, 0),
    ])
    def test_worked_values(self, trace, formula, pos, neg):
        result = evaluate(trace, parse(formula))

        assert result.pos == pytest.approx(pos)
        assert result.neg == pytest.approx(neg)

    @pytest.mark.parametrize("step,expected", [(0.0, 1.0), (2.5, 0.75), (5.0, 0.5), (7.5, 0.25), (10.0, 0.0)])
    def test_expeditiousness_curve(self, step, expected):
        """The later the airbag fires within ten seconds, the lower the positive robustness."""

        times, values = ([0.0], [1.0]) if step == 0 else ([0.0, step], [-1.0, 1.0])
        trace = Trace(channels={"airbag": FPCSignal.from_steps(times, values)})

        assert evaluate(trace, parse("AvF[0,10] airbag")).pos == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("held,expected", [(50.0, 0.0), (52.5, 0.25), (55.0, 0.5), (60.0, 1.0)])
    def test_persistence_curve(self, held, expected):
        """The averaged tail rewards holding on past the required 50 seconds."""

        trace = Trace(channels={"g": FPCSignal.from_steps([0.0, held], [1.0, -1.0])})

        assert evaluate(trace, parse("AvG[50,60] g")).pos == pytest.approx(expected, abs=1e-9)

    def test_expeditious_airbag(self, braking_trace, expeditious_airbag):
        """The second braking waits four seconds for the airbag, so the worst case is 0.6."""

        result = evaluate(braking_trace, expeditious_airbag)

        assert result.pos == pytest.approx(0.6)
        assert result.neg == pytest.approx(-0.4)

    def test_deadline_partial_credit(self, braking_trace, airbag_deadline):
        """Firing before the soft deadline earns full robustness, firing after it partial credit."""

        assert evaluate(braking_trace, airbag_deadline).pos == pytest.approx(1.0)
        assert evaluate(braking_trace.shift(4.0), airbag_deadline).pos == pytest.approx(0.8)

    def test_unknown_variable(self, speed_trace):
        with pytest.raises(UnknownVariable):
            evaluate(speed_trace, parse("F[0,1] w > 0"))

    def test_nested_averaging(self, speed_trace):
        with pytest.raises(UnsupportedFormula):
            evaluate(speed_trace, parse("AvF[0,1] AvG[0,1] v > 0"))

    @pytest.mark.parametrize("formula,pos,neg", [
        ("(v > 0 U[0,1] AvF[0,1] v > 0)", 100, 0),
        ("(AvG[0,2] v < 50 R[0,1] v > 0)", 100, 0),
        ("(AvF[0,1] v > 0 U[0,1] v < 50)", 0, -50),
    ])
    def test_averaged_until_operands(self, speed_trace, formula, pos, neg):
        """Until and release take averaged operands."""

        result = evaluate(speed_trace, parse(formula))

        assert result.pos == pytest.approx(pos)
        assert result.neg == pytest.approx(neg)

    def test_average_over_infinity(self):
        """Averaging a window that is infinite only in part is undefined."""

        signal = FPCSignal.from_steps([0.0, 1.0], [0.0, math.inf])

        with pytest.raises(EvaluationError):
            avg_eventually(signal, 0.0, 2.0)

        assert avg_eventually(signal.shift(1.0), 0.0, 2.0).value_at(0.0) == math.inf


class TestRobustSignal:
    """Tests related to whole robustness signals."""

    def test_atom(self, speed_trace):
        signal = robust_signal(speed_trace, parse("v >= 80"))

        assert signal.pos.segments == [(0, 20, 0)]
        assert signal.neg.segments == [(0, 0, 0)]

    def test_averaging_free_is_piecewise_constant(self, rng):
        """Without averaged operators every robustness signal is a step function."""

        for _ in range(100):
            trace = random_trace(rng, max_segments=20)
            signal = robust_signal(trace, random_formula(rng, averaged=False))

            assert signal.pos.is_piecewise_constant
            assert signal.neg.is_piecewise_constant

    def test_averaging_free_zero_correspondence(self, rng):
        """Without averaged operators one of the two channels is always zero."""

        for _ in range(200):
            trace = random_trace(rng, max_segments=20)
            result = evaluate(trace, random_formula(rng, averaged=False))

            assert result.pos == 0 or result.neg == 0

    def test_averaged_eventually_below_plain(self, rng):
        """Averaged eventually and until never exceed their plain forms, so they never create truth."""

        checked = 0

        while checked < 100:
            trace = random_trace(rng, max_segments=20)
            formula = random_formula(rng)
            averaged = [(path, node) for path, node in formula.walk() if node.averaged]

            if not averaged or not all(
                    isinstance(node, (Eventually, Until)) and is_positive_position(formula, path)
                    for path, node in averaged):
                continue

            refined = evaluate(trace, formula)
            plain = evaluate(trace, _strip_averaging(formula))
            checked += 1

            assert refined.pos <= plain.pos + 1e-9

            if refined.pos > 0:
                assert plain.pos > 0

    def test_dump(self, mixed_trace, tmp_path):
        path = tmp_path / "signal.csv"
        robust_signal(mixed_trace, parse("AvF[0,2] x >= 0")).to_csv(path)
        lines = path.read_text().splitlines()

        assert lines[0] == "time,pos,pos_slope,neg,neg_slope"
        assert len(lines) > 2


class TestUntil:
    """Tests related to until, release and their averaged forms."""

    def test_untimed_until(self):
        """The best witness balances the right operand against the left operand's prefix."""

        s1 = FPCSignal.from_steps([0.0, 3.0], [2.0, 0.5])
        s2 = FPCSignal.from_steps([0.0, 2.0, 4.0], [0.0, 1.0, 3.0])

        assert untimed_until(s1, s2).segments == [(0, 1, 0), (4, 3, 0)]

    def test_untimed_until_true_left(self):
        """A left operand that always holds reduces until to a running maximum."""

        s2 = FPCSignal.from_steps([0.0, 1.0, 2.0], [1.0, 3.0, 0.0])

        assert untimed_until(FPLSignal.constant(math.inf), s2) == running_extremum(s2, LatticeOp.MAX)

    def test_untimed_until_constant(self):
        c = FPLSignal.constant(2.0)

        assert untimed_until(c, c).segments == [(0, 2, 0)]

    def test_untimed_until_sloped_right(self):
        """A rising right operand beats the capped witnesses once it passes the left operand."""

        s2 = FPLSignal.from_segments([(0, 0, 1), (2, 0, 0)])

        assert untimed_until(FPLSignal.constant(1.0), s2).segments == [(0, 1, 0), (1, 1, 1), (2, 0, 0)]

    def test_untimed_until_sloped_left(self):
        """A late witness is capped by the infimum the falling left operand approaches."""

        s1 = FPLSignal.from_segments([(0, 3, -1), (2, 5, 0)])
        s2 = FPCSignal.from_steps([0.0, 3.0], [0.0, 1.5])

        assert untimed_until(s1, s2).segments == [(0, 1, 0), (2, 1.5, 0)]

    def test_untimed_until_sloped_fast_path(self, rng):
        """Step functions give the same result through the sloped recurrence."""

        for _ in range(50):
            s1 = random_signal(rng, 10, 10.0, low=0.0)
            s2 = random_signal(rng, 10, 10.0, low=0.0)

            assert _same_values(_linear_until(s1, s2), untimed_until(s1, s2), 10.0)

    def test_untimed_until_wrong_channel(self):
        with pytest.raises(EvaluationError):
            untimed_until(FPLSignal.constant(-1.0), FPLSignal.constant(0.0), Channel.POS)

    def test_true_until_is_eventually(self, mixed_trace):
        """``true U[a,b] phi`` and ``F[a,b] phi`` are the same formula."""

        for a, b in [(0.0, 1.0), (0.5, 2.0), (2.0, 2.5)]:
            until = robust_signal(mixed_trace, parse(f"true U[{a},{b}] y >= 2"))
            eventually = robust_signal(mixed_trace, parse(f"F[{a},{b}] y >= 2"))

            assert _same_values(until.pos, eventually.pos, mixed_trace.horizon)
            assert _same_values(until.neg, eventually.neg, mixed_trace.horizon)

    @pytest.mark.parametrize("release_text,always_text", [
        ("false R[1,3] x <= 3", "G[1,3] x <= 3"),
        ("false AvR[1,3] x <= 3", "AvG[1,3] x <= 3"),
        ("false R x <= 3", "G x <= 3"),
    ])
    def test_false_release_is_always(self, mixed_trace, release_text, always_text):
        """``false R[a,b] phi`` and ``G[a,b] phi`` are the same formula."""

        release = robust_signal(mixed_trace, parse(release_text))
        always = robust_signal(mixed_trace, parse(always_text))

        assert _same_values(release.pos, always.pos, mixed_trace.horizon)
        assert _same_values(release.neg, always.neg, mixed_trace.horizon)

    def test_bounded_until_without_delay(self):
        """With ``a = 0`` the guard is the untimed until itself."""

        s1 = FPCSignal.from_steps([0.0, 1.0], [3.0, 0.0])
        s2 = FPCSignal.from_steps([0.0, 0.5, 2.0], [0.0, 1.0, 5.0])

        assert until_guard(s1, s2, 0.0) == untimed_until(s1, s2)
        assert bounded_until(s1, s2, 0.0, 3.0).value_at(0.0) == 1.0

    def test_bounded_until_with_delay(self):
        """The left operand has to hold on the whole delay before the window opens."""

        s1 = FPCSignal.from_steps([0.0, 1.0], [3.0, 0.5])
        s2 = FPCSignal.from_steps([0.0, 2.0], [0.0, 4.0])

        assert bounded_until(s1, s2, 2.0, 3.0).value_at(0.0) == 0.5
        assert bounded_until(s1, s2, 2.0, 3.0).value_at(1.0) == 0.5

    def test_avg_until_true_left(self):
        """Averaged until with a left operand that always holds is the averaged eventually."""

        s2 = FPCSignal.from_steps([0.0, 1.0, 2.5], [0.5, 2.0, 1.0])
        guard = until_guard(FPLSignal.constant(math.inf), s2, 1.0)

        assert _same_values(avg_until(s2, guard, 1.0, 3.0), avg_eventually(s2, 1.0, 3.0), 5.0)

    def test_avg_until_constant(self):
        c = FPCSignal.constant(0.75)

        assert avg_until(c, FPLSignal.constant(1.0), 0.0, 2.0).value_at(0.0) == pytest.approx(0.75)

    def test_release_duality(self):
        """Release with a left operand that never holds is a sliding minimum."""

        s2 = FPCSignal.from_steps([0.0, 0.5, 1.5], [2.0, 1.0, 3.0])
        release = release_via_duality(FPLSignal.constant(0.0), s2, Interval(lo=0, hi=2), channel=Channel.POS)

        assert release.value_at(0.0) == 1.0
        assert _same_values(release, sliding_window(s2, 0.0, 2.0, LatticeOp.MIN), 5.0)

    def test_not_eventually_is_always_not(self, rng):
        for _ in range(100):
            trace = random_trace(rng, max_segments=20)
            phi = random_formula(rng, max_depth=2)
            interval = f"[{float(rng.integers(0, 4))},{float(rng.integers(4, 8))}]"

            first = robust_signal(trace, parse(f"!F{interval} ({phi})"))
            second = robust_signal(trace, parse(f"G{interval} !({phi})"))

            assert _same_values(first.pos, second.pos, trace.horizon)
            assert _same_values(first.neg, second.neg, trace.horizon)

    @pytest.mark.parametrize("averaged", [False, True])
    def test_release_is_dual_until(self, rng, averaged):
        """The positive robustness of release is the negated negative robustness of until over negated operands."""

        for _ in range(300):
            trace = random_trace(rng, max_segments=20)
            left = random_formula(rng, max_depth=2, averaged=not averaged, constants=False)
            right = random_formula(rng, max_depth=2, averaged=not averaged, constants=False)
            interval = _random_interval(rng, unbounded=not averaged)
            release = robust_signal(trace, Release(interval=interval, left=left, right=right, is_averaged=averaged))
            until = robust_signal(trace, Until(
                interval=interval, left=Not(operand=left), right=Not(operand=right), is_averaged=averaged))

            for t in [0.0] + sample_times(rng, trace, 3):
                assert release.pos.value_at(t) == pytest.approx(-until.neg.value_at(t), abs=1e-9)
                assert release.neg.value_at(t) == pytest.approx(-until.pos.value_at(t), abs=1e-9)

    @pytest.mark.parametrize("averaged", [False, True])
    def test_true_until_is_eventually_random(self, rng, averaged):
        """``true U[a,b] phi`` and ``F[a,b] phi`` agree as whole signals on random traces."""

        for _ in range(200):
            trace = random_trace(rng, max_segments=20)
            phi = random_formula(rng, max_depth=2, averaged=not averaged, constants=False)
            interval = _random_interval(rng, unbounded=not averaged)
            until = robust_signal(trace, Until(interval=interval, left=TrueFormula(), right=phi, is_averaged=averaged))
            eventually = robust_signal(trace, Eventually(interval=interval, operand=phi, is_averaged=averaged))

            assert _same_values(until.pos, eventually.pos, trace.horizon)
            assert _same_values(until.neg, eventually.neg, trace.horizon)


class TestMonotonicity:
    """Tests related to how robustness moves with the interval."""

    @pytest.mark.parametrize("operator,growing", [("U", True), ("AvU", True), ("R", False), ("AvR", False)])
    def test_longer_intervals(self, rng, operator, growing):
        """Widening the right end makes until easier and release harder, averaged or not."""

        for _ in range(100):
            trace = random_trace(rng, max_segments=15)
            left = random_formula(rng, max_depth=1, averaged=False, constants=False)
            right = random_formula(rng, max_depth=1, averaged=False, constants=False)
            t0 = float(rng.integers(0, 4)) * 0.5
            t1 = t0 + float(rng.integers(1, 5)) * 0.5
            t2 = t1 + float(rng.integers(0, 5)) * 0.5

            if t2 == t1:
                t2 = t1 + 0.25

            shorter = evaluate(trace, parse(f"({left}) {operator}[{t0},{t1}] ({right})"))
            longer = evaluate(trace, parse(f"({left}) {operator}[{t0},{t2}] ({right})"))

            if not growing:
                shorter, longer = longer, shorter

            assert shorter.pos <= longer.pos + 1e-9
            assert shorter.neg <= longer.neg + 1e-9

    def test_averaged_until_approaches_unbounded(self, rng):
        """Averaging over ever longer intervals converges to the unbounded until."""

        for _ in range(50):
            trace = random_trace(rng, max_segments=15)
            left = random_formula(rng, max_depth=1, averaged=False, constants=False)
            right = random_formula(rng, max_depth=1, averaged=False, constants=False)
            previous = -math.inf

            for end in (2.0, 20.0, 2e3, 2e9):
                value = evaluate(trace, parse(f"({left}) AvU[1,{end}] ({right})")).pos

                assert value >= previous - 1e-9
                previous = value

            unbounded = evaluate(trace, parse(f"({left}) U[1,inf) ({right})")).pos

            assert previous == pytest.approx(unbounded, abs=1e-6)

    def test_logical_monotonicity(self, rng):
        """Plugging a more robust subformula into a positive context never lowers robustness."""

        for _ in range(500):
            trace = random_trace(rng, max_segments=15)
            context = random_formula(rng, max_depth=3)
            holes = [path for path, _ in context.walk() if is_positive_position(context, path)]
            path = holes[int(rng.integers(0, len(holes)))]
            phi = random_formula(rng, max_depth=2, averaged=False, constants=False)

            if rng.random() < 0.5:
                relaxed = Or(left=phi, right=random_formula(rng, max_depth=1, averaged=False, constants=False))
            else:
                relaxed = Eventually(interval=Interval(lo=0.0, hi=float(rng.integers(1, 5)) * 0.5), operand=phi)

            low = evaluate(trace, replace_at(context, path, phi))
            high = evaluate(trace, replace_at(context, path, relaxed))

            assert low.pos <= high.pos + 1e-9
            assert low.neg <= high.neg + 1e-9

    def test_unbounded_averaged_is_plain(self, mixed_trace):
        for text in ["F[1,inf) x > 3", "G[0.5,inf) y < 3.5", "(p U[1,inf) x > 3)"]:
            averaged = text.replace("F[", "AvF[").replace("G[", "AvG[").replace("U[", "AvU[")

            assert evaluate(mixed_trace, parse(averaged)) == evaluate(mixed_trace, parse(text))

    def test_true_is_top(self, mixed_trace):
        result = evaluate(mixed_trace, TrueFormula())

        assert result.pos == math.inf
        assert result.neg == 0
