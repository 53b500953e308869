import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from tpsforge.linalg import DEFAULT_SEED, DEFAULT_TOL

settings.register_profile(
    "repo",
    deadline=None,
    derandomize=True,
    max_examples=25,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("repo")


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def preset_results():
    """Sections and checks of every preset, computed once per session."""
    from tpsforge.presets import PRESETS, run_preset

    return {name: run_preset(name, DEFAULT_SEED, DEFAULT_TOL) for name in PRESETS}
