import pytest

from avstl_monitor.models.signals import FPCSignal, FPLSignal, Trace


@pytest.fixture()
def speed_trace() -> Trace:
    """Vehicle speed held at 100 for ten seconds."""

    return Trace(channels={"v": FPCSignal.from_steps([0.0, 10.0], [100.0, 100.0])})


@pytest.fixture()
def slow_speed_trace() -> Trace:
    """Vehicle speed that never reaches 80."""

    return Trace(channels={"v": FPCSignal.from_steps([0.0, 10.0], [50.0, 50.0])})


@pytest.fixture()
def airbag_trace() -> Trace:
    """Airbag proposition switching on at 0.5 seconds."""

    return Trace(channels={"airbag": FPCSignal.from_steps([0.0, 0.5], [-1.0, 1.0])})


@pytest.fixture()
def braking_trace() -> Trace:
    """Heavy braking at 2s and 6s, the airbag firing 1s after the first and 4s after the second."""

    return Trace(channels={
        "heavyBraking": FPCSignal.from_steps([0.0, 2.0, 2.5, 6.0, 6.5], [-1.0, 1.0, -1.0, 1.0, -1.0]),
        "airbag": FPCSignal.from_steps([0.0, 3.0, 3.5, 10.0, 10.5], [-1.0, 1.0, -1.0, 1.0, -1.0]),
    })


@pytest.fixture()
def staircase_signal() -> FPCSignal:
    """Step function whose sliding maxima are worked out by hand in the window tests."""

    return FPCSignal.from_steps([0.0, 1.0, 3.0, 4.0, 5.0, 8.0], [0.2, 0.6, 0.2, 0.3, 0.7, 0.9])


@pytest.fixture()
def ramp_signal() -> FPLSignal:
    """``t -> t``."""

    return FPLSignal.from_segments([(0.0, 0.0, 1.0)])


@pytest.fixture()
def mixed_trace() -> Trace:
    """Two real-valued channels and one proposition with interleaved breakpoints."""

    return Trace(channels={
        "x": FPCSignal.from_steps([0.0, 1.0, 2.5, 4.0, 7.0], [1.0, -2.0, 3.5, 0.5, -1.0]),
        "y": FPCSignal.from_steps([0.0, 1.5, 3.0, 6.0], [-0.5, 2.0, 4.0, 1.0]),
        "p": FPCSignal.from_steps([0.0, 2.0, 5.0], [1.0, -1.0, 1.0]),
    })
