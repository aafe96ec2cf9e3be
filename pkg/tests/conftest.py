import math

import pytest

from twocolor.field import config_from_lab


@pytest.fixture(scope="session")
def cfg45():
    """Reference scenario: 4e14 W/cm^2, 800 nm, hydrogen, equal mixing."""
    return config_from_lab(4e14, 800.0, theta_deg=45.0)


@pytest.fixture(scope="session")
def cfg0(cfg45):
    return cfg45.with_theta(0.0)


@pytest.fixture(scope="session")
def cfg90(cfg45):
    return cfg45.with_theta(math.pi / 2.0)
