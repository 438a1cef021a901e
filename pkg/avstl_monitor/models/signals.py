from __future__ import annotations

import csv
import math
from bisect import bisect_left, bisect_right
from enum import StrEnum
from pathlib import Path
from typing import Annotated, Iterable, Self, Sequence

from pydantic import Field

from ..config import CONFIG
from ..exceptions import EvaluationError, SignalDomainError
from .base import FrozenModel

__all__ = (
    "PLUS_INF",
    "MINUS_INF",
    "ExtendedReal",
    "LatticeOp",
    "ClampMode",
    "FPLSignal",
    "FPCSignal",
    "Trace",
)

PLUS_INF = math.inf
MINUS_INF = -math.inf

ExtendedReal = Annotated[float, Field(allow_inf_nan=True)]


class LatticeOp(StrEnum):
    """Pointwise lattice operation."""

    MIN = "min"
    MAX = "max"


class ClampMode(StrEnum):
    """Half-line a signal is clamped into."""

    NONNEG = "nonneg"
    NONPOS = "nonpos"


def _close(x: float, y: float) -> bool:
    if math.isinf(x) or math.isinf(y):
        return x == y

    return math.isclose(x, y, rel_tol=1e-12, abs_tol=1e-12)


def _normalize(
    times: Sequence[float], values: Sequence[float], slopes: Sequence[float]
) -> tuple[tuple[float, ...], tuple[float, ...], tuple[float, ...]]:
    """Drop near-empty segments and merge segments that continue one another."""

    snap = CONFIG.CROSSING_SNAP
    out_t: list[float] = []
    out_v: list[float] = []
    out_q: list[float] = []

    for index, (t, v, q) in enumerate(zip(times, values, slopes)):
        if math.isinf(v):
            q = 0.0

        q = q + 0.0  # folds -0.0

        if index + 1 < len(times) and times[index + 1] - t <= snap:
            continue

        if out_t:
            prev_t, prev_v, prev_q = out_t[-1], out_v[-1], out_q[-1]
            reached = prev_v if math.isinf(prev_v) else prev_v + prev_q * (t - prev_t)

            if prev_q == q and _close(reached, v):
                continue

            if t - prev_t <= snap:
                out_t.pop()
                out_v.pop()
                out_q.pop()

        if not out_t:
            t = 0.0

        out_t.append(t)
        out_v.append(v)
        out_q.append(q)

    return tuple(out_t), tuple(out_v), tuple(out_q)


class FPLSignal(FrozenModel):
    """A finitely piecewise-linear signal.

    Segment ``i`` covers ``[times[i], times[i + 1])`` and takes the value
    ``values[i] + slopes[i] * (t - times[i])`` there. The last segment
    extends to infinity.

    Attributes:
        times (tuple[float, ...]): Strictly increasing breakpoints, starting at 0.
        values (tuple[float, ...]): Value at the start of each segment, possibly infinite.
        slopes (tuple[float, ...]): Slope of each segment; 0 for infinite segments.
    """

    times: tuple[float, ...]
    values: tuple[ExtendedReal, ...]
    slopes: tuple[float, ...]

    def model_post_init(self, __context):
        if not self.times:
            raise ValueError("a signal needs at least one segment")

        if not len(self.times) == len(self.values) == len(self.slopes):
            raise ValueError("times, values and slopes must have the same length")

        if self.times[0] != 0:
            raise ValueError("the first timestamp must be 0")

        for earlier, later in zip(self.times, self.times[1:]):
            if not later > earlier:
                raise ValueError("timestamps must be strictly increasing")

        if any(math.isinf(t) or math.isnan(t) for t in self.times):
            raise ValueError("timestamps must be finite")

        for value, slope in zip(self.values, self.slopes):
            if math.isnan(value) or not math.isfinite(slope):
                raise ValueError("values cannot be NaN and slopes must be finite")

            if math.isinf(value) and slope != 0:
                raise ValueError("an infinite segment must have slope 0")

    @classmethod
    def _build(cls, times: Sequence[float], values: Sequence[float], slopes: Sequence[float]) -> Self:
        times, values, slopes = _normalize(times, values, slopes)

        return cls.model_construct(times=times, values=values, slopes=slopes)

    @classmethod
    def from_segments(cls, segments: Iterable[Sequence[float]]) -> Self:
        """Build a signal from ``(t, r)`` or ``(t, r, q)`` tuples, canonicalized."""

        times, values, slopes = [], [], []

        for segment in segments:
            times.append(float(segment[0]))
            values.append(float(segment[1]))
            slopes.append(float(segment[2]) if len(segment) > 2 else 0.0)

        cls(times=tuple(times), values=tuple(values), slopes=tuple(slopes))

        return cls._build(times, values, slopes)

    @classmethod
    def constant(cls, value: float) -> Self:
        return cls.model_construct(times=(0.0,), values=(float(value),), slopes=(0.0,))

    @property
    def segments(self) -> list[tuple[float, float, float]]:
        return list(zip(self.times, self.values, self.slopes))

    @property
    def horizon(self) -> float:
        """Timestamp of the last breakpoint."""

        return self.times[-1]

    @property
    def is_piecewise_constant(self) -> bool:
        return all(slope == 0 for slope in self.slopes)

    def __len__(self) -> int:
        return len(self.times)

    def _segment_value(self, index: int, t: float) -> float:
        value = self.values[index]

        if math.isinf(value):
            return value

        return value + self.slopes[index] * (t - self.times[index])

    def end_value(self, index: int) -> float:
        """Left limit of segment ``index`` at its right end."""

        if index + 1 >= len(self.times):
            raise SignalDomainError("the last segment has no right end")

        return self._segment_value(index, self.times[index + 1])

    def segment_index(self, t: float) -> int:
        """Index of the segment containing ``t``."""

        if t < 0:
            raise SignalDomainError(f"signals are undefined at negative time {t}")

        return bisect_right(self.times, t) - 1

    def value_at(self, t: float) -> float:
        return self._segment_value(self.segment_index(t), t)

    def left_limit(self, t: float) -> float:
        """Limit of the signal when approaching ``t`` from the left."""

        if t <= 0:
            raise SignalDomainError(f"no left limit at time {t}")

        return self._segment_value(bisect_left(self.times, t) - 1, t)

    def shift(self, d: float) -> FPLSignal:
        """The ``d``-shift of the signal, ``t -> s(t + d)``."""

        if d < 0:
            raise SignalDomainError(f"cannot shift by a negative amount {d}")

        if d == 0:
            return self

        index = bisect_right(self.times, d) - 1
        times = [0.0] + [t - d for t in self.times[index + 1:]]
        values = [self._segment_value(index, d)] + list(self.values[index + 1:])

        return FPLSignal._build(times, values, self.slopes[index:])

    def negate(self) -> FPLSignal:
        return FPLSignal.model_construct(
            times=self.times,
            values=tuple(-v for v in self.values),
            slopes=tuple(-q + 0.0 for q in self.slopes),
        )

    def pointwise(self, other: FPLSignal, op: LatticeOp) -> FPLSignal:
        """Pointwise minimum or maximum, splitting segments where two lines cross."""

        snap = CONFIG.CROSSING_SNAP
        take_max = op == LatticeOp.MAX
        times, values, slopes = [], [], []
        i = j = 0
        t = 0.0

        while True:
            next_i = self.times[i + 1] if i + 1 < len(self.times) else math.inf
            next_j = other.times[j + 1] if j + 1 < len(other.times) else math.inf
            end = min(next_i, next_j)

            va, qa = self._segment_value(i, t), self.slopes[i]
            vb, qb = other._segment_value(j, t), other.slopes[j]

            if math.isinf(va) or math.isinf(vb) or qa == qb:
                first_wins = (va > vb) == take_max if va != vb else True
                times.append(t)
                values.append(va if first_wins else vb)
                slopes.append(qa if first_wins else qb)
            else:
                crossing = t + (vb - va) / (qa - qb)

                if va != vb and t + snap < crossing < end - snap:
                    first_wins = (va > vb) == take_max
                    win_v, win_q, lose_v, lose_q = (va, qa, vb, qb) if first_wins else (vb, qb, va, qa)
                    times += [t, crossing]
                    values += [win_v, lose_v + lose_q * (crossing - t)]
                    slopes += [win_q, lose_q]
                else:
                    probe = t + (min(end, t + 1.0) - t) / 2
                    pa = va + qa * (probe - t)
                    pb = vb + qb * (probe - t)
                    first_wins = (pa >= pb) == take_max
                    times.append(t)
                    values.append(va if first_wins else vb)
                    slopes.append(qa if first_wins else qb)

            if math.isinf(end):
                break

            t = end

            if next_i == end:
                i += 1

            if next_j == end:
                j += 1

        return FPLSignal._build(times, values, slopes)

    def clamp(self, mode: ClampMode) -> FPLSignal:
        """Pointwise maximum (NONNEG) or minimum (NONPOS) with zero."""

        op = LatticeOp.MAX if mode == ClampMode.NONNEG else LatticeOp.MIN

        return self.pointwise(FPLSignal.constant(0.0), op)

    def area(self, lo: float, hi: float) -> float:
        """Exact integral over ``[lo, hi]``.

        Raises:
            SignalDomainError: If the bounds are negative or reversed.
            EvaluationError: If the window mixes finite and infinite values.
        """

        if lo < 0 or hi < lo:
            raise SignalDomainError(f"invalid integration window [{lo}, {hi}]")

        if hi == lo:
            return 0.0

        first = bisect_right(self.times, lo) - 1
        total = 0.0
        infinite: set[float] = set()
        finite = False

        for index in range(first, len(self.times)):
            start = max(self.times[index], lo)

            if start >= hi:
                break

            end = min(self.times[index + 1], hi) if index + 1 < len(self.times) else hi

            if math.isinf(self.values[index]):
                infinite.add(self.values[index])
                continue

            finite = True
            total += (end - start) * (self._segment_value(index, start) + self._segment_value(index, end)) / 2

        if infinite:
            if finite or len(infinite) > 1:
                raise EvaluationError(
                    f"cannot integrate over [{lo}, {hi}]: the window mixes finite and infinite values")

            return infinite.pop()

        return total

    def canonicalize(self) -> FPLSignal:
        return type(self)._build(self.times, self.values, self.slopes)

    def as_fpc(self) -> FPCSignal:
        if not self.is_piecewise_constant:
            raise SignalDomainError("signal is not piecewise constant")

        return FPCSignal.model_construct(times=self.times, values=self.values, slopes=self.slopes)


class FPCSignal(FPLSignal):
    """A finitely piecewise-constant signal (every slope is zero)."""

    def model_post_init(self, __context):
        super().model_post_init(__context)

        if not self.is_piecewise_constant:
            raise ValueError("piecewise-constant signals cannot have slopes")

    @classmethod
    def from_steps(cls, times: Sequence[float], values: Sequence[float]) -> Self:
        return cls.from_segments(zip(times, values))


class Trace(FrozenModel):
    """A multi-variable piecewise-constant signal, one channel per variable."""

    channels: dict[str, FPCSignal]

    def model_post_init(self, __context):
        if not self.channels:
            raise ValueError("a trace needs at least one channel")

        for name, channel in self.channels.items():
            if not all(math.isfinite(value) for value in channel.values):
                raise ValueError(f"channel {name} contains non-finite values")

    @property
    def variables(self) -> frozenset[str]:
        return frozenset(self.channels)

    @property
    def horizon(self) -> float:
        """Largest timestamp present in any channel."""

        return max(channel.horizon for channel in self.channels.values())

    @property
    def breakpoints(self) -> list[float]:
        return sorted({t for channel in self.channels.values() for t in channel.times})

    def __getitem__(self, variable: str) -> FPCSignal:
        return self.channels[variable]

    def __len__(self) -> int:
        """Total number of segments over all channels."""

        return sum(len(channel) for channel in self.channels.values())

    def shift(self, d: float) -> Trace:
        return Trace(channels={name: channel.shift(d).as_fpc() for name, channel in self.channels.items()})

    @classmethod
    def from_samples(cls, times: Sequence[float], columns: dict[str, Sequence[float]]) -> Self:
        """Zero-order-hold trace from sample instants and one column per variable."""

        if not times or times[0] != 0:
            raise SignalDomainError("sample times must start at 0")

        if any(not later > earlier for earlier, later in zip(times, times[1:])):
            raise SignalDomainError("sample times must be strictly increasing")

        return cls(channels={
            name: FPCSignal.from_steps(times, [float(v) for v in column])
            for name, column in columns.items()
        })

    @classmethod
    def from_csv(cls, path: str | Path) -> Self:
        """Read a ``time,var1,var2,...`` CSV file."""

        with open(path, newline="", encoding="utf-8") as file:
            reader = csv.reader(file)
            header = next(reader, None)

            if not header or header[0].strip() != "time" or len(header) < 2:
                raise SignalDomainError(f"{path}: header must be time,var1,var2,...")

            names = [name.strip() for name in header[1:]]
            times: list[float] = []
            columns: dict[str, list[float]] = {name: [] for name in names}

            for row_number, row in enumerate(reader, start=2):
                if not row:
                    continue

                if len(row) != len(header):
                    raise SignalDomainError(f"{path}:{row_number}: expected {len(header)} columns")

                try:
                    times.append(float(row[0]))

                    for name, cell in zip(names, row[1:]):
                        columns[name].append(float(cell))
                except ValueError as e:
                    raise SignalDomainError(f"{path}:{row_number}: {e}") from e

        return cls.from_samples(times, columns)

    def to_csv(self, path: str | Path):
        """Write the trace with 17 significant digits, one row per breakpoint."""

        names = sorted(self.channels)

        with open(path, "w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file)
            writer.writerow(["time", *names])

            for t in self.breakpoints:
                writer.writerow([f"{t:.17g}", *(f"{self.channels[name].value_at(t):.17g}" for name in names)])
