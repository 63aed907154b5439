import numpy as np
import pytest

from apps.ldpca.ldpca import build_code


@pytest.fixture
def rng():
    return np.random.default_rng(2024)


@pytest.fixture
def small_code():
    return build_code(256, 3, 0)


@pytest.fixture
def qcif_code():
    return build_code(1584, 3, 0)
