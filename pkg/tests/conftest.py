import pytest

from ptrack.pressure_law import gamma_law


@pytest.fixture(scope="session")
def law3():
    return gamma_law(3.0)


@pytest.fixture(scope="session")
def law1():
    return gamma_law(1.0)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(results):
        terminalreporter.write_line(results[key])
