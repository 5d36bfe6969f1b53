"""Shared fixtures."""

import numpy as np
import pytest

from braidtrack.engine import create_engine_options
from braidtrack.poly import parse_poly


@pytest.fixture
def cusp():
    return parse_poly("z^3 - t^2")


@pytest.fixture
def two_branch():
    return parse_poly("z^4 - 4*z^2 + 3 + t")


@pytest.fixture
def not_generated():
    return parse_poly("z^3 - t^2*(1 - t)")


@pytest.fixture
def opts():
    return create_engine_options(seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
