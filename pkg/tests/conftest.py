import numpy as np
import pytest

from sqglab.grid import GridSpec, RealField
from sqglab.kernel import build_profile, build_derivative_profile
from sqglab.grid import MultiIndex


@pytest.fixture(scope="session")
def profile15():
    return build_profile(1.5)


@pytest.fixture(scope="session")
def dprofile15_10():
    return build_derivative_profile(1.5, MultiIndex(1, 0))


@pytest.fixture(scope="session")
def dprofile15_20():
    return build_derivative_profile(1.5, MultiIndex(2, 0))


@pytest.fixture
def grid_2pi():
    return GridSpec(32, 2 * np.pi)


@pytest.fixture
def grid_small():
    return GridSpec(64, 20.0)


def make_random_field(grid: GridSpec, seed: int = 0) -> RealField:
    from sqglab.initial_data import random_band_limited

    return random_band_limited(grid, seed)
