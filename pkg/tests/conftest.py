import numpy as np
import pytest

from ionize.joint import build_joint_system
from ionize.params import fitted_device, fitted_transmon
from ionize.transmon import transmon_eigensystem


@pytest.fixture(scope="session")
def tp():
    return fitted_transmon()


@pytest.fixture(scope="session")
def tp_eig(tp):
    return transmon_eigensystem(tp)


@pytest.fixture(scope="session")
def dev():
    return fitted_device()


@pytest.fixture(scope="session")
def joint(dev):
    return build_joint_system(dev)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240917)
