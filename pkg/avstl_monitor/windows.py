"""Linear-time sliding-window kernels.

Every kernel scans the input right to left and keeps the monotone envelope
of the current window in a stackqueue: new left endpoints are pushed at the
back after popping the entries they dominate, stale entries leave from the
front.
"""

from __future__ import annotations

import logging
import math
from collections import deque

from .config import CONFIG
from .exceptions import EvaluationError, SignalDomainError, UnsupportedFormula
from .models.signals import FPLSignal, LatticeOp

__all__ = ("Window", "sliding_window", "running_extremum", "averaged_window")


def _check_bounds(a: float, b: float):
    if not 0 <= a < b:
        raise SignalDomainError(f"window [{a}, {b}] must satisfy 0 <= a < b")


def _term(value: float, width: float) -> float:
    return 0.0 if math.isinf(value) else value * width


class Window:
    """Stackqueue over a step function, with its running area.

    Entries ``(x, v)`` are kept front-to-back with decreasing ``x`` and
    decreasing ``v``: read back-to-front they form the increasing staircase
    of running maxima starting at the window's left edge. ``pairs_area`` is
    the area of every step except the last one, measured from stored
    timestamps.
    """

    def __init__(self):
        self.entries: deque[tuple[float, float]] = deque()
        self.pairs_area = 0.0

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def front(self) -> tuple[float, float]:
        return self.entries[0]

    @property
    def back(self) -> tuple[float, float]:
        return self.entries[-1]

    def push(self, x: float, value: float):
        """Push a new left endpoint after popping the entries it dominates."""

        entries = self.entries

        while entries and entries[-1][1] <= value:
            self._pop_back()

        if entries:
            self.pairs_area += _term(value, entries[-1][0] - x)

        entries.append((x, value))

    def _pop_back(self):
        x, value = self.entries.pop()

        if self.entries:
            self.pairs_area -= _term(value, self.entries[-1][0] - x)

    def dequeue(self):
        """Drop the front (oldest, rightmost) entry."""

        x, _ = self.entries.popleft()
        neighbour_x, neighbour_value = self.entries[0]
        self.pairs_area -= _term(neighbour_value, x - neighbour_x)

    def truncate(self, ceiling: float):
        """Cap every entry at ``ceiling``, merging the capped ones into one."""

        if not self.entries or self.front[1] <= ceiling:
            return

        x = None

        while self.entries and self.front[1] > ceiling:
            x, _ = self.entries.popleft()

            if self.entries:
                neighbour_x, neighbour_value = self.entries[0]
                self.pairs_area -= _term(neighbour_value, x - neighbour_x)

        if self.entries:
            neighbour_x, neighbour_value = self.entries[0]
            self.pairs_area += _term(neighbour_value, x - neighbour_x)

        self.entries.appendleft((x, ceiling))

    def rebuild_area(self):
        """Recompute the running area from scratch to shed rounding drift."""

        ordered = list(reversed(self.entries))
        self.pairs_area = sum(_term(value, later[0] - x) for (x, value), later in zip(ordered, ordered[1:]))

    def area(self, left: float, right: float) -> tuple[float, float]:
        """Area and its rate of change for a window spanning ``[left, right]``."""

        back_x, back_value = self.back
        front_x, front_value = self.front

        if math.isinf(back_value) or math.isinf(front_value):
            if back_value != front_value:
                raise EvaluationError(
                    f"cannot average over [{left}, {right}]: the window mixes finite and infinite values")

            return back_value, 0.0

        total = self.pairs_area - back_value * (left - back_x) + front_value * (right - front_x)

        return total, front_value - back_value


def _from_descending(pieces: list[tuple[float, float, float]]) -> FPLSignal:
    pieces.reverse()

    return FPLSignal._build(*zip(*pieces))


def _vertex_window_max(s: FPLSignal, a: float, b: float) -> FPLSignal:
    """Step function ``t -> max`` of the values at breakpoints inside ``(t+a, t+b]``.

    Both the value and the left limit of a breakpoint count.
    """

    times = s.times
    window: deque[tuple[float, float]] = deque()
    nxt = len(times) - 1
    pieces: list[tuple[float, float, float]] = []
    t_hi = math.inf

    while True:
        while nxt >= 1 and times[nxt] - a >= t_hi:
            value = max(s.values[nxt], s.end_value(nxt - 1))

            while window and window[-1][1] <= value:
                window.pop()

            window.append((times[nxt], value))
            nxt -= 1

        while window and window[0][0] - b >= t_hi:
            window.popleft()

        push_at = times[nxt] - a if nxt >= 1 else -math.inf
        exit_at = window[0][0] - b if window else -math.inf
        tau = max(push_at, exit_at, 0.0)

        pieces.append((tau, window[0][1] if window else -math.inf, 0.0))

        if tau <= 0:
            return _from_descending(pieces)

        t_hi = tau


def sliding_window(s: FPLSignal, a: float, b: float, mode: LatticeOp) -> FPLSignal:
    """Supremum (MAX) or infimum (MIN) of ``s`` over ``[t+a, t+b]``, as a signal of ``t``.

    Args:
        s (FPLSignal): Input signal, piecewise constant or piecewise linear.
        a (float): Window start offset.
        b (float): Window end offset, strictly greater than ``a``.
        mode (LatticeOp): MAX or MIN.

    Returns:
        FPLSignal: The windowed signal.
    """

    _check_bounds(a, b)

    if mode == LatticeOp.MIN:
        return sliding_window(s.negate(), a, b, LatticeOp.MAX).negate()

    result = s.shift(a).pointwise(_vertex_window_max(s, a, b), LatticeOp.MAX)

    if not s.is_piecewise_constant:
        result = result.pointwise(s.shift(b), LatticeOp.MAX)

    return result


def running_extremum(s: FPLSignal, mode: LatticeOp) -> FPLSignal:
    """Supremum (MAX) or infimum (MIN) of ``s`` over ``[t, inf)``."""

    if mode == LatticeOp.MIN:
        return running_extremum(s.negate(), LatticeOp.MAX).negate()

    times, values, slopes = s.times, s.values, s.slopes
    last = len(times) - 1
    pieces: list[tuple[float, float, float]] = []

    if slopes[last] > 0:
        carry = math.inf
        pieces.append((times[last], math.inf, 0.0))
    else:
        carry = values[last]
        pieces.append((times[last], values[last], slopes[last]))

    for index in range(last - 1, -1, -1):
        start, value, slope = times[index], values[index], slopes[index]
        end_value = s.end_value(index)

        if slope >= 0 or math.isinf(value):
            carry = max(end_value, carry)
            pieces.append((start, carry, 0.0))
        elif end_value >= carry:
            pieces.append((start, value, slope))
            carry = value
        elif value <= carry:
            pieces.append((start, carry, 0.0))
        else:
            crossing = start + (carry - value) / slope
            pieces.append((crossing, carry, 0.0))
            pieces.append((start, value, slope))
            carry = value

    return _from_descending(pieces)


def averaged_window(s: FPLSignal, a: float, b: float, guard: FPLSignal | None = None) -> FPLSignal:
    """``t -> 1/(b-a) * integral over tau in [a,b] of min(sup of s on [t+a, t+tau], guard(t))``.

    Without a guard this is the averaged eventually of ``s``; with the
    until guard it is the averaged until.

    Raises:
        UnsupportedFormula: If ``s`` or ``guard`` is not piecewise constant.
        EvaluationError: If a window mixes finite and infinite values.
    """

    _check_bounds(a, b)

    if not s.is_piecewise_constant or (guard is not None and not guard.is_piecewise_constant):
        raise UnsupportedFormula("averaged operators need an averaging-free operand")

    length = b - a
    times, values = s.times, s.values
    guard_times, guard_values = (guard.times, guard.values) if guard is not None else ((0.0,), (math.inf,))
    recompute_every = CONFIG.AREA_RECOMPUTE_INTERVAL

    window = Window()
    window.push(times[-1], values[-1])
    nxt = len(times) - 2
    guard_index = len(guard_times) - 1
    pieces: list[tuple[float, float, float]] = []
    slides = 0
    t_hi = math.inf

    logging.debug(f"Averaging {len(times)} segments over [{a}, {b}]")

    while True:
        while nxt >= 0 and times[nxt + 1] - a >= t_hi:
            window.push(times[nxt], values[nxt])
            nxt -= 1

        while len(window) > 1 and window.front[0] - b >= t_hi:
            window.dequeue()

        while guard_index > 0 and guard_times[guard_index] >= t_hi:
            guard_index -= 1

        window.truncate(guard_values[guard_index])

        slides += 1

        if slides % recompute_every == 0:
            window.rebuild_area()

        push_at = times[nxt + 1] - a if nxt >= 0 else -math.inf
        exit_at = window.front[0] - b if len(window) > 1 else -math.inf
        guard_at = guard_times[guard_index] if guard_index > 0 else -math.inf
        tau = max(push_at, exit_at, guard_at, 0.0)

        total, rate = window.area(tau + a, tau + b)
        pieces.append((tau, total / length if math.isfinite(total) else total, rate / length))

        if tau <= 0:
            return _from_descending(pieces)

        t_hi = tau

