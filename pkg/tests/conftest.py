import numpy as np
import pytest

from oicloc.cas import Cas
from oicloc.oic import SegmentHypothesis


@pytest.fixture
def rng():
    return np.random.default_rng(20260823)


@pytest.fixture
def ramp_cas():
    """Single class, simple plateau with low shoulders; handy for hand math."""
    return Cas(np.array([[0.0, 0.1, 0.9, 1.0, 0.8, 0.1, 0.0]]))


@pytest.fixture
def ramp_hypothesis():
    return SegmentHypothesis(3.0, 5.0, 2.0, 6.0, 1)


def random_hypothesis(rng, T):
    """A hypothesis whose rounded boundaries fit the padded grid [0, T+1]."""
    x1 = int(rng.integers(1, T + 1))
    x2 = int(rng.integers(x1, min(T, x1 + 11) + 1))
    left = int(rng.integers(0, min(x1, 5) + 1))
    right = int(rng.integers(0, min(T + 1 - x2, 5) + 1))
    if left + right == 0:  # the outer ring must not be empty
        if bool(rng.integers(0, 2)):
            left = 1
        else:
            right = 1  # x2 <= T, so x2 + 1 stays on the grid
    return SegmentHypothesis(float(x1), float(x2), float(x1 - left), float(x2 + right), 1)
