import os
import sys

import numpy as np
import pytest

# Add backend directory to Python path
backend_dir = os.path.abspath(os.path.dirname(__file__))
if backend_dir not in sys.path:
    sys.path.insert(0, backend_dir)

from domain.models import NoiseProfile, TaskSpec
from infrastructure.sampling import make_spiked_model, sample_spiked, sample_unit_vector


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", default=False, help="run experiment-scale checks")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: experiment-scale check, needs --runslow")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def spiked_model():
    """d=10, r=2, nu=1, homoskedastic sigma=1."""
    return make_spiked_model(10, 2, 1.0, 1.0, seed=7, profile=NoiseProfile.HOMOSKEDASTIC)


@pytest.fixture
def stepped_model():
    """d=20, r=3, nu=1, sigma=2 on the signal coordinates and 0.5 elsewhere."""
    return make_spiked_model(20, 3, 1.0, 2.0, seed=11)


@pytest.fixture
def spiked_sample(spiked_model):
    return np.array(sample_spiked(spiked_model, 200, seed=3).x)


@pytest.fixture
def task(spiked_model):
    return TaskSpec(w_star=sample_unit_vector(spiked_model.r, seed=5), sigma_eps=0.1)
