import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(17)


@pytest.fixture
def ac_band(rng):
    return rng.laplace(0, 12, size=396)
