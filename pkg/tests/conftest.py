import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=30, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240501)


def random_points(seed, count, radius):
    """Seeded points in the disk of the given radius."""
    r = np.random.default_rng(seed)
    rad = radius * np.sqrt(r.uniform(size=count))
    ang = r.uniform(0, 2 * np.pi, size=count)
    return np.column_stack([rad * np.cos(ang), rad * np.sin(ang)])
