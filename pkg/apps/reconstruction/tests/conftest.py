import numpy as np
import pytest

from apps.frames.frames import Frame
from apps.transform.transform import frame_to_bands


@pytest.fixture
def rng():
    return np.random.default_rng(8)


@pytest.fixture
def si_bands(rng):
    return frame_to_bands(Frame(rng.integers(0, 256, size=(32, 32), dtype=np.uint8)))
