from __future__ import annotations

import pytest

_RESULTS: dict[int, tuple[str, str, float, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion with a runtime limit in seconds")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when != "call":
        return
    number, title, limit = marker.args
    status = "PASS" if report.passed else "FAIL"
    if number in _RESULTS:  # parametrised criterion: fail if any case fails, report the slowest case
        _, prev, slowest, _ = _RESULTS[number]
        status = "FAIL" if "FAIL" in (prev, status) else "PASS"
        duration = max(slowest, report.duration)
    else:
        duration = report.duration
    _RESULTS[number] = (title, status, duration, limit)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, status, duration, limit = _RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d} {status}  {title}  ({duration:.1f} s, limit {limit} s)")
