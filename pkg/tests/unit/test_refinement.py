import pytest

from avstl_monitor.exceptions import RefinementError
from avstl_monitor.generators import random_formula, random_trace
from avstl_monitor.models.formulas import Always, Eventually, Formula, Interval, NodePath, node_at, replace_at
from avstl_monitor.parser import parse
from avstl_monitor.refinement import refinable_paths, refine_always, refine_eventually
from avstl_monitor.robustness import evaluate

# fixtures
from .fixtures.traces import mixed_trace


def _refinable(rng, kind: type[Formula]) -> tuple[Formula, NodePath]:
    """Random averaging-free formula and the path of a refinable ``kind`` node in it."""

    while True:
        formula = random_formula(rng, max_depth=3, averaged=False)
        paths = [path for path, found in refinable_paths(formula) if found is kind]

        if paths:
            return formula, paths[int(rng.integers(0, len(paths)))]


def _with_deadline(formula: Formula, path: NodePath, hi: float) -> Formula:
    node = node_at(formula, path)

    return replace_at(formula, path, node.model_copy(update={"interval": Interval(lo=node.interval.lo, hi=hi)}))


class TestRewrites:
    """Tests related to the refinement rewrites themselves."""

    @pytest.mark.parametrize("text,path,expected", [
        ("F[0,40] omega >= 2000", (), "AvF[0,40] omega >= 2000"),
        ("G F[0,10] (omega <= 3500 | omega >= 4500)", (0,), "G AvF[0,10] (omega <= 3500 | omega >= 4500)"),
        ("a & (b -> F[1,2] c)", (1, 1), "a & (b -> AvF[1,2] c)"),
    ])
    def test_refine_eventually(self, text, path, expected):
        assert refine_eventually(parse(text), path) == parse(expected)

    @pytest.mark.parametrize("text,path,delta,expected", [
        ("G[0,4] !gear4", (), 6, "G[0,4] !gear4 & AvG[4,10] !gear4"),
        ("F (G[0,1] gear3)", (0,), 9, "F (G[0,1] gear3 & AvG[1,10] gear3)"),
    ])
    def test_refine_always(self, text, path, delta, expected):
        assert refine_always(parse(text), path, delta) == parse(expected)

    @pytest.mark.parametrize("text,path", [
        ("!F[0,1] p", (0,)),
        ("F[0,1] p -> q", (0,)),
        ("F p", ()),
        ("AvF[0,1] p", ()),
        ("G[0,1] p", ()),
        ("F[0,1] p", (0,)),
        ("F[0,1] p", (3,)),
    ])
    def test_refine_eventually_errors(self, text, path):
        """Only bounded plain eventually nodes at positive positions can be refined."""

        with pytest.raises(RefinementError):
            refine_eventually(parse(text), path)

    @pytest.mark.parametrize("delta", [0, -1])
    def test_refine_always_needs_tail(self, delta):
        with pytest.raises(RefinementError):
            refine_always(parse("G[0,4] !gear4"), (), delta)

    def test_refinable_paths(self):
        formula = parse("F[0,1] p & !G[0,2] q | G[1,3] F r")

        assert refinable_paths(formula) == [((0, 0), Eventually), ((1,), Always)]


class TestSoundness:
    """Tests related to refinements never hiding a violation."""

    def test_refinement_is_harsher(self, rng):
        """A refined formula is never more robust than the original on either channel."""

        checked = 0

        while checked < 200:
            trace = random_trace(rng, max_segments=20)
            formula = random_formula(rng, max_depth=3, averaged=False)
            paths = refinable_paths(formula)

            if not paths:
                continue

            path, kind = paths[int(rng.integers(0, len(paths)))]

            if kind is Eventually:
                refined = refine_eventually(formula, path)
            else:
                refined = refine_always(formula, path, float(rng.integers(1, 5)) * 0.5)

            strict = evaluate(trace, refined)
            plain = evaluate(trace, formula)
            checked += 1

            assert strict.pos <= plain.pos + 1e-9
            assert strict.neg <= plain.neg + 1e-9


    def test_refined_until_operand(self, mixed_trace):
        """A refined eventually inside an until operand evaluates, and never above the plain formula."""

        formula = parse("(F[0,1] p U[0,2] y >= 2)")
        refined = refine_eventually(formula, (0,))

        assert refined == parse("(AvF[0,1] p U[0,2] y >= 2)")
        assert evaluate(mixed_trace, refined).pos <= evaluate(mixed_trace, formula).pos + 1e-9


class TestCompleteness:
    """Tests related to refinements keeping every input that satisfies a slightly stricter formula."""

    def test_earlier_deadline(self, rng):
        """Meeting ``F[a,b']`` with ``b' < b`` robustly also meets ``AvF[a,b]`` robustly."""

        satisfied = 0

        for _ in range(500):
            trace = random_trace(rng, max_segments=20)
            formula, path = _refinable(rng, Eventually)
            interval = node_at(formula, path).interval
            earlier = interval.lo + interval.length * float(rng.integers(1, 4)) / 4

            if evaluate(trace, _with_deadline(formula, path, earlier)).pos > 0:
                satisfied += 1

                assert evaluate(trace, refine_eventually(formula, path)).pos > 0

        assert satisfied > 0

    def test_longer_hold(self, rng):
        """Holding ``G[a,b']`` with ``b' > b`` robustly also satisfies the refined always robustly."""

        satisfied = 0

        for _ in range(500):
            trace = random_trace(rng, max_segments=20)
            formula, path = _refinable(rng, Always)
            later = node_at(formula, path).interval.hi + float(rng.integers(1, 9)) * 0.25
            delta = float(rng.integers(1, 5)) * 0.5

            if evaluate(trace, _with_deadline(formula, path, later)).pos > 0:
                satisfied += 1

                assert evaluate(trace, refine_always(formula, path, delta)).pos > 0

        assert satisfied > 0
