import math

import pytest

from slzeros import potential

PI = math.pi


@pytest.fixture(scope="session")
def q_zero():
    return potential.zero()


@pytest.fixture(scope="session")
def q_const5():
    return potential.constant(5.0)


@pytest.fixture(scope="session")
def q_cos2x():
    return potential.cosine(1.0, 2.0)


@pytest.fixture(scope="session")
def q_step():
    return potential.step(10.0, 1.0, 2.0)


@pytest.fixture(scope="session")
def q_singular():
    return potential.power(1.0, -0.5)
