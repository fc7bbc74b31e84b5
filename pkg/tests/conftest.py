import re

_CRITERION = re.compile(r"test_criterion_(\d+)_")
_results: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    n = int(m.group(1))
    if report.when == "call" or report.failed:
        name = report.nodeid.split("::")[-1]
        status = "PASS" if report.passed else "FAIL"
        if n not in _results or status == "FAIL":
            _results[n] = (status, name)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_results):
        status, name = _results[n]
        terminalreporter.write_line(f"criterion {n}: {status}  {name}")
