import numpy as np
import pytest

from logtm.constants import Params
from logtm.profiles import SampledProfile, weighted_norm


def random_unit_profile(rng, params: Params, n_pts: int = 256, t_max: float = 30.0):
    """Random non-positive decreasing-magnitude-in-r profile with unit norm."""
    t = np.linspace(0.0, t_max, n_pts)
    # random non-negative slopes with a decaying envelope so mass spreads out
    slopes = rng.random(n_pts - 1) * np.exp(-rng.uniform(0.0, 0.2) * t[:-1])
    m = np.concatenate(([0.0], np.cumsum(slopes * np.diff(t))))
    raw = SampledProfile(t, -m)
    nrm = weighted_norm(raw, params)
    return SampledProfile(t, -m / nrm)


def zero_profile(n_pts: int = 64, t_max: float = 40.0):
    t = np.linspace(0.0, t_max, n_pts)
    return SampledProfile(t, np.zeros_like(t))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
