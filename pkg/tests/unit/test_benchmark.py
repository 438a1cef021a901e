import pytest

from avstl_monitor.benchmark import DEFAULT_BENCH_FORMULA, bench, bench_trace
from avstl_monitor.exceptions import ConfigurationError
from avstl_monitor.parser import parse


class TestBench:
    """Tests related to the scaling benchmark."""

    def test_trace_size(self, rng):
        trace = bench_trace(rng, ["y", "x"], 500)

        assert sorted(trace.channels) == ["x", "y"]
        assert all(len(channel) <= 500 for channel in trace.channels.values())

    def test_single_size(self):
        report = bench([100], parse(DEFAULT_BENCH_FORMULA), repetitions=1)

        assert len(report.rows) == 1
        assert report.rows[0].ratio is None
        assert report.exponent is None
        assert report.passed

    def test_growth(self):
        report = bench([200, 400], parse(DEFAULT_BENCH_FORMULA), repetitions=3, seed=1)

        assert [row.size for row in report.rows] == [200, 400]
        assert report.rows[1].ratio is not None
        assert report.exponent is not None
        assert "fitted exponent" in report.table()

    @pytest.mark.parametrize("sizes,repetitions", [([100], 0), ([], 1)])
    def test_invalid(self, sizes, repetitions):
        with pytest.raises(ConfigurationError):
            bench(sizes, parse(DEFAULT_BENCH_FORMULA), repetitions=repetitions)

    @pytest.mark.slow
    def test_doubling(self):
        """Doubling the trace at most doubles the time, with slack for noise."""

        report = bench([10_000, 20_000], parse(DEFAULT_BENCH_FORMULA))

        assert report.passed, report.table()

    @pytest.mark.slow
    def test_fitted_exponent(self):
        """Over two decades of trace length the fitted log-log slope stays close to one."""

        report = bench([1_000, 10_000, 100_000], parse(DEFAULT_BENCH_FORMULA), repetitions=3)

        assert report.exponent is not None
        assert report.exponent <= 1.2, report.table()
