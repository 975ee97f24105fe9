import re

import pytest

_CRITERIA = {}
_PATTERN = re.compile(r"test_acceptance\.py::test_c(\d+)_")


@pytest.fixture
def report(request):
    """Attach measured values to an acceptance test's summary line."""
    def add(text):
        request.node.user_properties.append(("detail", text))
    return add


def pytest_runtest_logreport(report):
    m = _PATTERN.search(report.nodeid)
    if not m:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        details = [v for k, v in report.user_properties if k == "detail"]
        _CRITERIA[int(m.group(1))] = (report.outcome, report.nodeid.split("::")[-1], details)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(_CRITERIA):
        outcome, name, details = _CRITERIA[k]
        tag = "PASS" if outcome == "passed" else "FAIL"
        extra = f"  [{'; '.join(details)}]" if details else ""
        tr.write_line(f"criterion {k:2d}: {tag}  {name}{extra}")
