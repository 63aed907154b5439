import numpy as np
import pytest

from apps.frames.frames import Frame


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def random_frame(rng):
    return Frame(rng.integers(0, 256, size=(32, 48), dtype=np.uint8))
