import numpy as np
import pytest

from apps.frames.frames import Frame, Sequence


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def gray_frame():
    return Frame(np.full((16, 16), 128, dtype=np.uint8))


@pytest.fixture
def random_sequence(rng):
    frames = [
        Frame(rng.integers(0, 256, size=(32, 48), dtype=np.uint8), index)
        for index in range(3)
    ]
    return Sequence(frames)
