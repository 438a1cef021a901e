from __future__ import annotations

import csv
from enum import StrEnum
from pathlib import Path

from pydantic import Field

from .base import FrozenModel
from .signals import ExtendedReal, FPLSignal

__all__ = ("Channel", "RobustnessPair", "RobustnessSignal")


class Channel(StrEnum):
    """Which of the two robustness values a signal carries."""

    POS = "pos"
    NEG = "neg"


class RobustnessPair(FrozenModel):
    """Positive and negative robustness of a formula at one instant.

    Attributes:
        pos (float): How robustly the formula holds, in ``[0, inf]``.
        neg (float): How robustly it fails, in ``[-inf, 0]``.
    """

    pos: ExtendedReal = Field(ge=0)
    neg: ExtendedReal = Field(le=0)

    @property
    def falsified(self) -> bool:
        return self.pos <= 0


class RobustnessSignal(FrozenModel):
    """Positive and negative robustness of a formula over time."""

    pos: FPLSignal
    neg: FPLSignal

    def at(self, t: float) -> RobustnessPair:
        return RobustnessPair(pos=self.pos.value_at(t), neg=self.neg.value_at(t))

    def channel(self, channel: Channel) -> FPLSignal:
        return self.pos if channel == Channel.POS else self.neg

    @property
    def breakpoints(self) -> list[float]:
        return sorted(set(self.pos.times) | set(self.neg.times))

    def to_csv(self, path: str | Path):
        """Write ``time,pos,pos_slope,neg,neg_slope`` rows, one per breakpoint."""

        with open(path, "w", newline="", encoding="utf-8") as file:
            writer = csv.writer(file)
            writer.writerow(["time", "pos", "pos_slope", "neg", "neg_slope"])

            for t in self.breakpoints:
                row = [t]

                for signal in (self.pos, self.neg):
                    row += [signal.value_at(t), signal.slopes[signal.segment_index(t)]]

                writer.writerow(f"{value:.17g}" for value in row)
