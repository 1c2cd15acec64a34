import numpy as np
import pytest

from smbp.instance import SmbpInstance


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tiny():
    """a=(1,1), b=(4,4), sigma=1, c=3: each item alone uses exactly 3."""
    return SmbpInstance(np.array([1.0, 1.0]), np.array([4.0, 4.0]), 1.0, 3.0)


def dense_instance(rng, n, capacity=72.0):
    sigma = float(rng.uniform(0.0, 2.5))
    a = rng.uniform(2.0, 30.0, n)
    b = rng.uniform(0.0, 150.0, n)
    t = np.minimum(1.0, capacity / (a + sigma * np.sqrt(b)))
    return SmbpInstance(a * t, b * t * t, sigma, capacity)
