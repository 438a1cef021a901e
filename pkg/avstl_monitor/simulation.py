"""Deterministic toy models standing in for a simulated vehicle."""

import logging
import math
from abc import ABC, abstractmethod
from functools import cache
from pathlib import Path

from .config import CONFIG
from .exceptions import ConfigurationError, SimulationError
from .models.signals import FPCSignal, Trace
from .models.simulation import EngineLagParameters, GearAutomatonParameters, ModelKind, ToyModelConstants

__all__ = (
    "Model",
    "GearAutomaton",
    "EngineLag",
    "load_toy_constants",
    "build_model",
    "simulate",
)

BUNDLED_CONSTANTS = Path(__file__).parent / "data" / "toy_models.json"


class Model(ABC):
    """A function from an input trace to an output trace."""

    inputs: tuple[str, ...] = ()
    outputs: tuple[str, ...] = ()

    @abstractmethod
    def simulate(self, input_trace: Trace, horizon: float) -> Trace:
        """Output trace covering at least ``[0, horizon]``."""

    @staticmethod
    def _sample_count(horizon: float, step: float) -> int:
        return math.ceil(horizon / step - 1e-6) + 1


class GearAutomaton(Model):
    """Four-state shift logic with a dwell time per gear.

    Every step the automaton may shift one gear up when throttle reaches the
    current gear's upshift threshold, or one gear down when it falls to the
    downshift threshold, but only once it has spent its dwell time in the
    current gear. Gear ``i`` is reported on channel ``gear{i}`` as +1/-1.
    """

    inputs = ("throttle",)
    outputs = ("gear1", "gear2", "gear3", "gear4")

    def __init__(self, parameters: GearAutomatonParameters = None):
        self.parameters = parameters or GearAutomatonParameters()

    def simulate(self, input_trace: Trace, horizon: float) -> Trace:
        parameters = self.parameters
        step = parameters.step
        throttle = input_trace["throttle"]
        gear, entered = 1, 0
        times: list[float] = []
        gears: list[int] = []

        for n in range(self._sample_count(horizon, step)):
            t = n * step
            u = throttle.value_at(t)

            if (n - entered) * step >= parameters.dwell[gear - 1] - 1e-9:
                if gear < 4 and u >= parameters.upshift[gear - 1]:
                    gear, entered = gear + 1, n
                elif gear > 1 and u <= parameters.downshift[gear - 2]:
                    gear, entered = gear - 1, n

            times.append(t)
            gears.append(gear)

        return Trace(channels={
            f"gear{i}": FPCSignal.from_steps(times, [1.0 if g == i else -1.0 for g in gears])
            for i in range(1, 5)
        })


class EngineLag(Model):
    """First-order engine lag integrated with fixed-step classic Runge-Kutta.

    Throttle is held constant over each step. Emits ``omega`` and the
    vehicle speed ``v = speed_factor * omega / gear_ratio``.
    """

    inputs = ("throttle",)
    outputs = ("omega", "v")

    def __init__(self, parameters: EngineLagParameters = None):
        self.parameters = parameters or EngineLagParameters()

    def simulate(self, input_trace: Trace, horizon: float) -> Trace:
        parameters = self.parameters
        step = parameters.step_fraction * parameters.time_constant
        throttle = input_trace["throttle"]
        omega = parameters.initial_speed
        times: list[float] = []
        speeds: list[float] = []

        def rate(w: float, u: float) -> float:
            return (parameters.gain * u - w) / parameters.time_constant

        for n in range(self._sample_count(horizon, step)):
            t = n * step

            if not math.isfinite(omega):
                raise SimulationError(f"engine speed diverged at t={t}")

            times.append(t)
            speeds.append(omega)

            u = throttle.value_at(t)
            k1 = rate(omega, u)
            k2 = rate(omega + step * k1 / 2, u)
            k3 = rate(omega + step * k2 / 2, u)
            k4 = rate(omega + step * k3, u)
            omega += step * (k1 + 2 * k2 + 2 * k3 + k4) / 6

        scale = parameters.speed_factor / parameters.gear_ratio

        return Trace(channels={
            "omega": FPCSignal.from_steps(times, speeds),
            "v": FPCSignal.from_steps(times, [scale * w for w in speeds]),
        })


@cache
def _read_constants(path: str) -> ToyModelConstants:
    try:
        return ToyModelConstants.model_validate_json(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise ConfigurationError(f"cannot read toy model constants from {path}: {e}") from e


def load_toy_constants(path: str | Path = None) -> ToyModelConstants:
    """Constants from ``path``, ``CONFIG.TOY_MODEL_FILE`` or the bundled file, in that order."""

    source = str(path or CONFIG.TOY_MODEL_FILE or BUNDLED_CONSTANTS)
    constants = _read_constants(source)

    logging.debug(f"Loaded toy model constants version {constants.version} from {source}")

    return constants


def build_model(kind: ModelKind, overrides: dict = None, constants: ToyModelConstants = None) -> Model:
    """Instantiate a built-in model, optionally overriding some of its constants."""

    constants = constants or load_toy_constants()
    overrides = overrides or {}

    match kind:
        case ModelKind.GEAR_AUTOMATON:
            parameters = constants.gear_automaton.model_dump() | overrides

            return GearAutomaton(GearAutomatonParameters(**parameters))
        case ModelKind.ENGINE_LAG:
            parameters = constants.engine_lag.model_dump() | overrides

            return EngineLag(EngineLagParameters(**parameters))

    raise ConfigurationError(f"unknown model {kind}")


def simulate(model: Model, input_trace: Trace, horizon: float) -> Trace:
    """Run ``model`` on ``input_trace``.

    Raises:
        SimulationError: If the input channels do not match the model's inputs,
            or the simulation produces non-finite values.
    """

    if input_trace.variables != frozenset(model.inputs):
        raise SimulationError(
            f"{type(model).__name__} expects inputs {sorted(model.inputs)}, got {sorted(input_trace.variables)}")

    if not horizon > 0:
        raise SimulationError(f"simulation horizon must be positive, got {horizon}")

    try:
        return model.simulate(input_trace, horizon)
    except ValueError as e:
        raise SimulationError(f"{type(model).__name__} produced an invalid output: {e}") from e
