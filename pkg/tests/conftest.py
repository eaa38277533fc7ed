import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default",
    max_examples=40,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def disk_points(n, radius, seed=0):
    """Deterministic grid-ish sample of the disk of the given radius."""
    g = np.random.default_rng(seed)
    r = radius * np.sqrt(g.uniform(0, 1, n))
    t = g.uniform(0, 2 * np.pi, n)
    return [complex(x) for x in r * np.exp(1j * t)]


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
