import math
import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from fermionic_nonlinearity.channels import build_basis
from fermionic_nonlinearity.nonlinearity import NonlinearityCache

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", deadline=None, max_examples=200,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def basis():
    return build_basis()


@pytest.fixture(scope="session")
def extended_basis():
    return build_basis((math.pi / 4, math.pi / 8, math.pi / 16))


@pytest.fixture(scope="session")
def cache(basis):
    return NonlinearityCache(basis)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
