"""Empirical scaling of the robustness engine in the trace length."""

import logging
import math
import time
from typing import Sequence

import numpy as np

from .config import CONFIG
from .exceptions import ConfigurationError
from .generators import random_signal
from .models.benchmark import BenchReport, BenchRow
from .models.formulas import Formula, variables
from .models.signals import Trace
from .parser import unparse
from .robustness import robust_signal

__all__ = ("DEFAULT_BENCH_FORMULA", "bench_trace", "bench")

DEFAULT_BENCH_FORMULA = "AvF[0,5] x >= 1 | G[0,2] y <= 3"


def bench_trace(rng: np.random.Generator, names: Sequence[str], size: int) -> Trace:
    """Trace with ``size`` segments per channel over roughly ``size`` seconds."""

    return Trace(channels={
        name: random_signal(rng, size, horizon=float(size), low=-10.0, high=10.0, grid=None) for name in sorted(names)
    })


def bench(sizes: Sequence[int], formula: Formula, repetitions: int = 5, seed: int = 0) -> BenchReport:
    """Median ``robust_signal`` time per trace size, with size-normalized growth ratios.

    Raises:
        ConfigurationError: If there are no repetitions or no sizes.
    """

    if repetitions < 1:
        raise ConfigurationError(f"repetitions must be at least 1, got {repetitions}")

    if not sizes:
        raise ConfigurationError("no trace sizes to benchmark")

    rng = np.random.default_rng(seed)
    names = sorted(variables(formula)) or ["x"]
    rows: list[BenchRow] = []

    for size in sizes:
        trace = bench_trace(rng, names, size)
        timings = []

        for _ in range(repetitions):
            started = time.perf_counter()
            robust_signal(trace, formula)
            timings.append(time.perf_counter() - started)

        median = float(np.median(timings))
        ratio = None

        if rows and rows[-1].median_seconds > 0 and size != rows[-1].size:
            growth = median / rows[-1].median_seconds
            ratio = growth ** (math.log(2) / math.log(size / rows[-1].size))

        rows.append(BenchRow(
            size=size, median_seconds=median, ratio=ratio, passed=ratio is None or ratio <= CONFIG.BENCH_MAX_RATIO))

        logging.info(f"Benchmarked {size} segments: median {median:.6f}s")

    exponent = None

    if len({row.size for row in rows}) > 1 and all(row.median_seconds > 0 for row in rows):
        exponent = float(np.polyfit(np.log([row.size for row in rows]), np.log([row.median_seconds for row in rows]), 1)[0])

    return BenchReport(formula=unparse(formula), repetitions=repetitions, rows=rows, exponent=exponent)
