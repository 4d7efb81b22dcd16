import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "ci", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("ci")


@pytest.fixture(scope="session")
def log_grid_small():
    return np.geomspace(1e-2, 1e2, 12)


@pytest.fixture(scope="session")
def breakpoint_offset_grid():
    """40 log-spaced t in [1e-3, 1e3], nudged 1e-9 off the breakpoints."""
    grid = np.geomspace(1e-3, 1e3, 40)
    for b in (1.0, 1.0 + np.sqrt(2.0)):
        close = np.abs(grid - b) < 1e-9
        grid[close] = b + 1e-9
    return grid
