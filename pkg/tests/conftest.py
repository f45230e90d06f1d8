import pytest
from hypothesis import HealthCheck, settings

from helpers import manifold

settings.register_profile("repo", max_examples=25, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repo")


@pytest.fixture
def sphere():
    return manifold("sphere_stereo(1)")


@pytest.fixture
def plane():
    return manifold("euclidean(2)")
