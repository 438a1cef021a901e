from enum import StrEnum
from typing import Annotated

from pydantic import Field

from .base import BaseModel

__all__ = ("ModelKind", "GearAutomatonParameters", "EngineLagParameters", "ToyModelConstants")

Positive = Annotated[float, Field(gt=0, allow_inf_nan=False)]
Fraction = Annotated[float, Field(ge=0, le=1)]


class ModelKind(StrEnum):
    """Built-in toy models."""

    GEAR_AUTOMATON = "GEAR_AUTOMATON"
    ENGINE_LAG = "ENGINE_LAG"


class GearAutomatonParameters(BaseModel):
    """Four-gear shift logic driven by throttle.

    Attributes:
        step (float): Fixed sampling step of the automaton, in seconds.
        dwell (list[float]): Minimum time spent in gears 1..4 before any shift.
        upshift (list[float]): Throttle at or above which gears 1..3 shift up.
        downshift (list[float]): Throttle at or below which gears 2..4 shift down.
    """

    step: Positive = 0.01
    dwell: list[Positive] = Field(default=[1.0, 1.0, 1.0, 1.0], min_length=4, max_length=4)
    upshift: list[Fraction] = Field(default=[0.3, 0.5, 0.7], min_length=3, max_length=3)
    downshift: list[Fraction] = Field(default=[0.1, 0.25, 0.4], min_length=3, max_length=3)

    def model_post_init(self, __context):
        # the downshift out of gear g+1 sits below the upshift into it
        for gear, (up, down) in enumerate(zip(self.upshift, self.downshift), start=1):
            if not down < up:
                raise ValueError(f"downshift threshold of gear {gear + 1} must be below the upshift of gear {gear}")


class EngineLagParameters(BaseModel):
    """First-order engine lag ``omega' = (gain * throttle - omega) / time_constant``.

    Attributes:
        step_fraction (float): Integration step as a fraction of the time constant.
        gain (float): Steady-state engine speed at full throttle, in rpm.
        time_constant (float): Lag time constant, in seconds.
        speed_factor (float): Converts engine speed over gear ratio into vehicle speed.
        gear_ratio (float): Fixed gear ratio between engine and wheels.
        initial_speed (float): Engine speed at time 0.
    """

    step_fraction: Positive = 0.01
    gain: Positive = 6000.0
    time_constant: Positive = 2.0
    speed_factor: Positive = 0.05
    gear_ratio: Positive = 2.5
    initial_speed: float = Field(default=0.0, ge=0, allow_inf_nan=False)


class ToyModelConstants(BaseModel):
    """Versioned constants of every built-in model."""

    version: int = Field(ge=1)
    gear_automaton: GearAutomatonParameters = GearAutomatonParameters()
    engine_lag: EngineLagParameters = EngineLagParameters()
