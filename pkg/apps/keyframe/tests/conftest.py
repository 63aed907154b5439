import numpy as np
import pytest

from apps.frames.frames import Frame
from apps.keyframe.keyframe import EXTERNAL, unregister_codec


@pytest.fixture
def rng():
    return np.random.default_rng(21)


@pytest.fixture
def noise_frame(rng):
    return Frame(rng.integers(0, 256, size=(32, 48), dtype=np.uint8))


@pytest.fixture
def smooth_frame():
    y, x = np.mgrid[0:48, 0:64]
    plane = 128 + 60 * np.sin(x / 7.0) * np.cos(y / 5.0)
    return Frame(np.clip(plane, 0, 255).astype(np.uint8))


@pytest.fixture
def external_slot():
    yield EXTERNAL
    unregister_codec(EXTERNAL)
