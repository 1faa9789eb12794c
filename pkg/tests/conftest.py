import numpy as np
import pytest

from potts_stable.instances import triangle_instance


@pytest.fixture
def triangle():
    return triangle_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
