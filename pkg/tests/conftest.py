import os
import sys

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile(
    "repo",
    derandomize=True,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much],
)
settings.load_profile("repo")


@pytest.fixture(scope="session")
def real_place():
    from dp4brauer.construct import real_place_surface

    return real_place_surface()


@pytest.fixture(scope="session")
def empty_set_surface():
    from dp4brauer.construct import family_surface
    from dp4brauer.surface import FamilyParams

    return family_surface(FamilyParams(17, 1, 103, 2))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
