import numpy as np
import pytest

from apps.frames.frames import Frame, Sequence


@pytest.fixture
def rng():
    return np.random.default_rng(99)


@pytest.fixture
def random_pair(rng):
    f1 = Frame(rng.integers(0, 256, size=(32, 32), dtype=np.uint8))
    f2 = Frame(rng.integers(0, 256, size=(32, 32), dtype=np.uint8))
    return f1, f2


@pytest.fixture
def translating_pair():
    y, x = np.mgrid[0:32, 0:48]
    pattern = (x * 5 + y * 3) % 256
    f1 = Frame(pattern)
    f2 = Frame(np.roll(pattern, 3, axis=1))
    return f1, f2


@pytest.fixture
def static_sequence():
    frame = Frame(np.full((16, 16), 90, dtype=np.uint8))
    return Sequence([frame] * 9)
