import numpy as np
import pytest

from apps.frames.frames import Frame


@pytest.fixture
def rng():
    return np.random.default_rng(31)


@pytest.fixture
def texture(rng):
    """64x80 random texture; crops of it translate without wrapping."""
    return rng.integers(0, 256, size=(64, 80), dtype=np.uint8)


@pytest.fixture
def translation(texture):
    """Backward, middle and forward frames moving right by 2 px per frame."""
    x_b = Frame(texture[:, 8:72], 0)
    middle = Frame(texture[:, 6:70], 1)
    x_f = Frame(texture[:, 4:68], 2)
    return x_b, middle, x_f
