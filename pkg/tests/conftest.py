import numpy as np
import pytest

from nmosc.spectral import Discrete, PowerLawExpCutoff, discretize


@pytest.fixture(scope="session")
def ohmic():
    return PowerLawExpCutoff(alpha=1.0, s=1.0, omega_c=1.0)


@pytest.fixture(scope="session")
def bath20(ohmic):
    """K=20 midpoint discretization of the unit Ohmic bath on [0, 5]."""
    return discretize(ohmic, 20, 5.0)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240611)


def max_abs(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))
