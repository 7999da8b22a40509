import numpy as np
import pytest
from hypothesis import settings

from heislab.lab.corpus import IDENTITY_BOX, make_corpus
from heislab.spectral import make_grid, sample

settings.register_profile("heislab", deadline=None, max_examples=40)
settings.load_profile("heislab")


@pytest.fixture(scope="session")
def grid32():
    return make_grid(IDENTITY_BOX, (32, 32, 32))


@pytest.fixture(scope="session")
def grid48():
    return make_grid(IDENTITY_BOX, (48, 48, 48))


@pytest.fixture(scope="session")
def bumps48(grid48):
    return [sample(grid48, r) for r in make_corpus(4, 11, IDENTITY_BOX)]


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
