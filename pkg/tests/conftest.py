import pytest
from hypothesis import HealthCheck, settings

from wzpi.catalog import load_catalog

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def catalog():
    return load_catalog()


# acceptance criteria: tests marked ``criterion(n)`` roll up into one line per criterion

_CRITERIA = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion the test belongs to")
    config.stash[_CRITERIA] = {}


@pytest.hookimpl(wrapper=True)
def pytest_runtest_makereport(item, call):
    report = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None and (report.when == "call" or report.failed or report.skipped):
        results = item.config.stash[_CRITERIA].setdefault(mark.args[0], [])
        results.append(report.passed or (report.when != "call" and not report.failed and not report.skipped))
    return report


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_CRITERIA, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok = all(results[n])
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({len(results[n])} checks)")
