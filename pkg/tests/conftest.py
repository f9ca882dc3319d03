import numpy as np
import pytest
from hypothesis import settings

from algebra.fock_operator import FockSpace

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")


@pytest.fixture
def space16():
    return FockSpace(16)


@pytest.fixture
def space32():
    return FockSpace(32)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
