import numpy as np
import pytest
from hypothesis import settings

from swlattice import Configuration, Lattice
from swlattice.checks import random_configuration

settings.register_profile("swlattice", max_examples=25, deadline=None)
settings.load_profile("swlattice")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def lat2():
    return Lattice(2, 1.0)


@pytest.fixture
def lat3():
    return Lattice(3, 0.7)


@pytest.fixture
def random_config(lat3, rng):
    return random_configuration(lat3, rng, 0.5)


def zero_config(n=2, h=1.0, kg=0.0, flux=(0,) * 6) -> Configuration:
    return Configuration.zero(Lattice(n, h), kg, flux)
