import numpy as np
import pytest

from multibump.ground_state import get_profile


@pytest.fixture(scope="session")
def profile_1d_p3():
    return get_profile(1, 3.0)


@pytest.fixture(scope="session")
def profile_1d_p4():
    return get_profile(1, 4.0)


@pytest.fixture(scope="session")
def profile_3d_p4():
    return get_profile(3, 4.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
