import random

import pytest
from hypothesis import HealthCheck, settings


settings.register_profile("default", deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

_criteria = {}


def pytest_runtest_logreport(report):
    if report.when != "call" or "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if name.startswith("test_criterion_"):
        _criteria[name] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_criteria, key=lambda s: int(s.split("_")[2])):
        n = int(name.split("_")[2])
        label = " ".join(name.split("_")[3:])
        verdict = "pass" if _criteria[name] == "passed" else "FAIL"
        terminalreporter.write_line(f"criterion {n:>2} ({label}): {verdict}")


@pytest.fixture
def rng():
    return random.Random(1234)
