"""Shared pytest wiring: one summary line per acceptance criterion."""

_results: dict[str, str] = {}


def pytest_runtest_logreport(report):
    if report.when != "call":
        return
    if "test_acceptance.py" in report.nodeid and "criterion" in report.nodeid:
        _results[report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid in sorted(_results, key=_criterion_number):
        name = nodeid.split("::")[-1]
        label = name.replace("test_criterion_", "criterion ").replace("_", " ")
        mark = "PASS" if _results[nodeid] == "passed" else "FAIL"
        terminalreporter.write_line(f"{label}: {mark}")


def _criterion_number(nodeid: str) -> int:
    name = nodeid.split("::")[-1]
    digits = "".join(ch for ch in name if ch.isdigit())
    return int(digits) if digits else 0
