import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fractalsurf import multiplication_operator, uniform_net

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def sinsin(x, y):
    return np.sin(np.pi * x) * np.sin(np.pi * y)


def bump_t(x, y):
    return 1 + x * (1 - x) * y * (1 - y)


@pytest.fixture
def net2():
    return uniform_net(2)


@pytest.fixture
def mult_op():
    return multiplication_operator(bump_t)


@pytest.fixture
def standard(net2, mult_op):
    """The standard case: sin(pi x) sin(pi y), multiplication by a corner-fixing bump, alpha = 0.3."""
    from fractalsurf import build_alpha_surface

    return build_alpha_surface(sinsin, mult_op, 0.3, net2)
