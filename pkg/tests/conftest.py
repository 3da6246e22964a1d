import numpy as np
import pytest

_criteria: dict[int, list] = {}


@pytest.fixture
def rng():
    return np.random.default_rng(20090301)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and report.passed):
        return
    _criteria.setdefault(marker.args[0], [marker.args[1], True])
    if not report.passed:
        _criteria[marker.args[0]][1] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_criteria):
        text, ok = _criteria[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {text}")
