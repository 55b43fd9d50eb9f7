import dataclasses

import pytest

from risnoma.config import default_bundle, default_system, default_thresholds


@pytest.fixture(scope="session")
def system():
    return default_system()


@pytest.fixture(scope="session")
def thresholds():
    return default_thresholds()


@pytest.fixture(scope="session")
def bundle():
    return default_bundle()


@pytest.fixture()
def light_system(system):
    """Default parameters on a reduced sampling window: cheap trials for
    tests that only probe mechanics, not tail-sensitive statistics."""
    spatial = dataclasses.replace(system.spatial, sim_radius=1600.0)
    return dataclasses.replace(system, spatial=spatial)
