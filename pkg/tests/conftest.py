import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=60, deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def fcc():
    from kissing.fan import build_hypermap, fcc_points
    return build_hypermap(fcc_points().fan())


@pytest.fixture(scope="session")
def hcp():
    from kissing.fan import build_hypermap, hcp_points
    return build_hypermap(hcp_points().fan())


@pytest.fixture(scope="session")
def classification():
    """Full single-threaded tame-contact classification, computed once per session."""
    from kissing.enumerator import EnumConfig, enumerate_tame_contact
    return enumerate_tame_contact(EnumConfig(jobs=1))


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
