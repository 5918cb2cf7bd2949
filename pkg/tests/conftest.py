import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

from gnbmo import parse_domain  # noqa: E402

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def unit_interval():
    return parse_domain("interval(0,1)")


@pytest.fixture(scope="session")
def unit_square():
    return parse_domain("square(0,1)")


@pytest.fixture(scope="session")
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
