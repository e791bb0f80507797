import numpy as np
import pytest

from causal_profit.numerics import RngStream


@pytest.fixture
def rng():
    return RngStream(12345, (7,))


@pytest.fixture
def np_rng():
    return np.random.default_rng(20240601)
