import re

_AC_RESULTS = {}


def pytest_runtest_logreport(report):
    match = re.search(r"test_ac(\d+)_", report.nodeid)
    if not match or "test_acceptance.py" not in report.nodeid:
        return
    key = int(match.group(1))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _AC_RESULTS[key] = (report.outcome, report.nodeid.split("::")[-1])


def pytest_terminal_summary(terminalreporter):
    if not _AC_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_AC_RESULTS):
        outcome, name = _AC_RESULTS[key]
        verdict = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"AC-{key}: {verdict}  ({name})")
