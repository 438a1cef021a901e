from __future__ import annotations

from enum import StrEnum
from itertools import accumulate
from typing import Any, Literal, Sequence

import numpy as np
from pydantic import Field

from .base import BaseModel, Seconds
from .signals import ExtendedReal, FPCSignal, Trace
from .simulation import ModelKind

__all__ = (
    "InputChannel",
    "InputSpec",
    "OptimizerKind",
    "OptimizerConfig",
    "FalsifyResult",
    "Problem",
    "CatalogueReference",
    "ExperimentConfig",
    "VariantSummary",
    "ProblemReport",
    "ExperimentReport",
)


class InputChannel(BaseModel):
    """One input of the model, searched over as ``control_points`` constant steps."""

    name: str
    lo: float
    hi: float
    control_points: int = Field(default=5, ge=1)

    def model_post_init(self, __context):
        if not self.lo < self.hi:
            raise ValueError(f"input {self.name} must have lo < hi")


class InputSpec(BaseModel):
    """Search space of piecewise-constant inputs with uniform breakpoints."""

    channels: list[InputChannel] = Field(min_length=1)
    horizon: Seconds = Field(gt=0)

    @property
    def dimension(self) -> int:
        return sum(channel.control_points for channel in self.channels)

    @property
    def bounds(self) -> tuple[np.ndarray, np.ndarray]:
        """Lower and upper bound of every coordinate of a control-point vector."""

        lows = np.concatenate([np.full(c.control_points, c.lo) for c in self.channels])
        highs = np.concatenate([np.full(c.control_points, c.hi) for c in self.channels])

        return lows, highs

    def build(self, vector: Sequence[float]) -> Trace:
        """Input trace for a control-point vector, channel after channel."""

        if len(vector) != self.dimension:
            raise ValueError(f"expected {self.dimension} control points, got {len(vector)}")

        channels = {}
        offset = 0

        for channel in self.channels:
            k = channel.control_points
            values = [min(max(float(v), channel.lo), channel.hi) for v in vector[offset:offset + k]]
            times = [i * self.horizon / k for i in range(k)]
            channels[channel.name] = FPCSignal.from_steps(times, values)
            offset += k

        return Trace(channels=channels)


class OptimizerKind(StrEnum):
    RANDOM = "RANDOM"
    ANNEAL = "ANNEAL"


class OptimizerConfig(BaseModel):
    """How the falsifier proposes inputs.

    Attributes:
        kind (OptimizerKind): RANDOM resamples every input independently; ANNEAL
            runs Metropolis moves on positive robustness.
        max_iterations (int): Simulation budget of one trial.
        seed (int): Seed of the trial's random generator.
        initial_temperature (float): Starting temperature of the annealer.
        cooling_rate (float): Geometric cooling factor applied every iteration.
        proposal_stddev (float): Standard deviation of a move, as a fraction of
            each coordinate's range.
        restart_after (int): Non-improving iterations before the annealer restarts
            from a fresh random input.
    """

    kind: OptimizerKind = OptimizerKind.ANNEAL
    max_iterations: int = Field(default=1000, ge=1)
    seed: int = Field(default=0, ge=0, lt=2 ** 64)
    initial_temperature: float = Field(default=1.0, gt=0)
    cooling_rate: float = Field(default=0.99, gt=0, lt=1)
    proposal_stddev: float = Field(default=0.1, gt=0)
    restart_after: int = Field(default=200, ge=1)


class FalsifyResult(BaseModel):
    """Outcome of one falsification trial."""

    success: bool
    falsifying_input: Trace | None = None
    iterations_used: int = Field(ge=0)
    robustness_history: list[ExtendedReal] = []
    wall_time: float = Field(ge=0)

    def model_post_init(self, __context):
        if len(self.robustness_history) != self.iterations_used:
            raise ValueError("robustness history must have one entry per iteration")

        if self.success != (bool(self.robustness_history) and self.robustness_history[-1] <= 0):
            raise ValueError("a trial succeeds exactly when its last robustness is not positive")

    @property
    def best_so_far(self) -> list[float]:
        """Running minimum of the robustness history."""

        return list(accumulate(self.robustness_history, min))


class Problem(BaseModel):
    """A model, an input space and the plain and refined specifications to falsify.

    Attributes:
        refined (str): Refined specification; the plain one when omitted.
    """

    name: str
    model: ModelKind
    model_parameters: dict[str, Any] = {}
    input_spec: InputSpec
    plain: str
    refined: str | None = None


class CatalogueReference(BaseModel):
    """A built-in problem, optionally with its time parameter changed."""

    catalogue: Literal["P1", "P2", "P3", "P4", "P5", "P6"]
    T: float | None = Field(default=None, gt=0)


class ExperimentConfig(BaseModel):
    """Contents of a falsification experiment file."""

    problems: list[Problem | CatalogueReference] = []
    trials: int = Field(default=20, ge=0)
    seeds: list[int] | None = None
    optimizer: OptimizerConfig = OptimizerConfig()

    def model_post_init(self, __context):
        if self.seeds is not None and len(self.seeds) < self.trials:
            raise ValueError(f"{self.trials} trials need at least as many seeds, got {len(self.seeds)}")


class VariantSummary(BaseModel):
    """Aggregate of the trials of one specification variant."""

    successes: int
    trials: int
    mean_iterations: float | None = None
    mean_iterations_successful: float | None = None
    mean_time: float | None = None
    mean_time_successful: float | None = None

    @classmethod
    def from_results(cls, results: list[FalsifyResult]) -> VariantSummary:
        successful = [result for result in results if result.success]

        def mean(values: list[float]) -> float | None:
            return float(np.mean(values)) if values else None

        return cls(
            successes=len(successful),
            trials=len(results),
            mean_iterations=mean([r.iterations_used for r in results]),
            mean_iterations_successful=mean([r.iterations_used for r in successful]),
            mean_time=mean([r.wall_time for r in results]),
            mean_time_successful=mean([r.wall_time for r in successful]),
        )


class ProblemReport(BaseModel):
    """Paired comparison of the plain and refined specification of one problem.

    Attributes:
        reverified (int): Refined successes whose input also falsifies the plain specification.
        plain_iterations (list[int]): Iterations used per seed by the plain specification.
        refined_iterations (list[int]): Iterations used per seed by the refined specification.
    """

    problem: str
    plain_formula: str
    refined_formula: str
    plain: VariantSummary
    refined: VariantSummary
    reverified: int
    plain_iterations: list[int] = []
    refined_iterations: list[int] = []


class ExperimentReport(BaseModel):
    problems: list[ProblemReport] = []

    def table(self) -> str:
        """The report as an aligned text table."""

        def cell(value: float | None, digits: int) -> str:
            return "-" if value is None else f"{value:.{digits}f}"

        header = ("problem", "variant", "succ", "iter", "iter(succ)", "time", "time(succ)")
        rows = [header]

        for report in self.problems:
            for variant, summary in (("plain", report.plain), ("refined", report.refined)):
                rows.append((
                    report.problem,
                    variant,
                    f"{summary.successes}/{summary.trials}",
                    cell(summary.mean_iterations, 1),
                    cell(summary.mean_iterations_successful, 1),
                    cell(summary.mean_time, 3),
                    cell(summary.mean_time_successful, 3),
                ))

        widths = [max(len(row[i]) for row in rows) for i in range(len(header))]

        return "\n".join(
            "  ".join(text.ljust(width) if i < 2 else text.rjust(width) for i, (text, width) in enumerate(zip(row, widths)))
            .rstrip()
            for row in rows
        )
