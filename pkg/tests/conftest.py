import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rankone.space import PRESETS

settings.register_profile(
    "rankone", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("rankone")


@pytest.fixture(params=sorted(PRESETS))
def space(request):
    return PRESETS[request.param]


@pytest.fixture
def h3():
    return PRESETS["H3"]


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record ``criterion N: PASS/FAIL`` for the acceptance summary."""
    number = request.node.get_closest_marker("criterion").args[0]
    _CRITERIA[number] = "FAIL"

    def passed():
        _CRITERIA[number] = "PASS"

    yield passed
    print(f"criterion {number}: {_CRITERIA[number]}")


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(f"criterion {number}: {_CRITERIA[number]}")
