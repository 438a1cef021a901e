import numpy as np
import pytest


@pytest.fixture()
def rng() -> np.random.Generator:
    """Seeded generator, so random instances are the same on every run."""

    return np.random.default_rng(20240101)
