import pytest
from hypothesis import HealthCheck, settings

from polar_mismatch.channels import bsc_pair

settings.register_profile(
    "default", max_examples=500, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@pytest.fixture
def bsc_mismatch():
    return bsc_pair(0.11, 0.89)


@pytest.fixture
def bsc_matched():
    return bsc_pair(0.11, 0.11)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
