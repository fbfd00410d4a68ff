import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from bracketlab.domain import Domain2
from bracketlab.fields import sin_p, sin_q


@pytest.fixture(scope="session")
def torus128():
    return Domain2.torus(128)


@pytest.fixture(scope="session")
def torus256():
    return Domain2.torus(256)


@pytest.fixture(scope="session")
def sin_pair(torus256):
    return sin_p(torus256), sin_q(torus256)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(0)
