import pytest

_results = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    passed, seconds, _ = _results.get(number, (True, 0.0, title))
    if report.when == "call" or report.failed:
        passed = passed and report.passed
    if report.when == "call":
        seconds += report.duration
    _results[number] = (passed, seconds, title)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        passed, seconds, title = _results[number]
        status = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number:2d}: {status}  {title} ({seconds:.1f} s)")
