import random

import pytest

from noether import JetSpace, Lagrangian, parse

from util import SEED


@pytest.fixture
def rng():
    return random.Random(SEED)


@pytest.fixture
def ode():
    """Space of one independent x and one dependent y, with headroom."""
    return JetSpace(["x"], ["y"], max_order=6)


@pytest.fixture
def pde():
    """Space of two independents (t, x) and one dependent u."""
    return JetSpace(["t", "x"], ["u"], max_order=4)


@pytest.fixture
def free_particle(ode):
    return Lagrangian(ode, 1, parse("1/2*y'^2", ode))


@pytest.fixture
def chain(ode):
    """The second-order Lagrangian y''^2 / 2 (dynamics y'''' = 0)."""
    return Lagrangian(ode, 2, parse("1/2*y''^2", ode))


@pytest.fixture
def planar():
    space = JetSpace(["t"], ["x", "y"], max_order=4)
    return Lagrangian(space, 1, parse("1/2*x'^2 + 1/2*y'^2", space))


@pytest.fixture
def quartic_field(pde):
    return Lagrangian(pde, 1, parse("1/12*u_x^4 + 1/2*u_t^2", pde))
