import numpy as np
import pytest

from holospin import PhysicalParams

T0 = 2.0 * np.pi  # oscillator period at omega = 1


@pytest.fixture
def params():
    return PhysicalParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
