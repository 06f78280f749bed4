import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from nevlab.surface import CurvatureProfile, ModelSurface

settings.register_profile("nevlab", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("nevlab")


@pytest.fixture(scope="session")
def plane():
    return ModelSurface.euclidean()


@pytest.fixture(scope="session")
def disc():
    return ModelSurface.poincare()


@pytest.fixture(scope="session")
def cusp_like():
    """Radial surface whose curvature decreases from 0 to -2 on [0, 4]."""
    profile = CurvatureProfile.tabulated([0.0, 1.0, 2.0, 4.0, 6.0], [0.0, -0.5, -1.0, -2.0, -2.0])
    return ModelSurface.radial(profile, r_max=6.0)


def random_profile(rng: np.random.Generator) -> CurvatureProfile:
    """A valid (non-positive, non-increasing) tabulated profile on [0, 5]."""
    n = int(rng.integers(2, 8))
    t = np.concatenate([[0.0], np.sort(rng.uniform(0.1, 4.9, n - 2)), [5.0]])
    t = np.unique(t)
    drops = rng.exponential(0.4, t.size)
    drops[0] = rng.uniform(0, 0.5)
    return CurvatureProfile.tabulated(t, -np.cumsum(drops))
