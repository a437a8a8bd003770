import pytest

from samples import diag_pair

_criteria = {}


@pytest.fixture
def dpair():
    return diag_pair()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or (report.when != "call" and not report.failed):
        return
    number, title = marker.args
    _criteria[number] = (report.passed, title, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        passed, title, duration = _criteria[number]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title} ({duration:.2f} s)")
