import numpy as np
import pytest

_CRITERIA: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "criterion(number, title): acceptance criterion exercised by the test"
    )


def pytest_collection_modifyitems(session, config, items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is None:
            continue
        number, title = mark.args
        entry = _CRITERIA.setdefault(number, {"title": title, "tests": {}})
        entry["tests"][item.nodeid] = None


def pytest_runtest_logreport(report):
    for entry in _CRITERIA.values():
        if report.nodeid not in entry["tests"]:
            continue
        if report.when == "call" or report.outcome != "passed":
            prev = entry["tests"][report.nodeid]
            if prev is None or prev == "passed":
                entry["tests"][report.nodeid] = report.outcome


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        entry = _CRITERIA[number]
        outcomes = list(entry["tests"].values())
        failed = sum(o not in (None, "passed") for o in outcomes)
        if failed:
            status = "FAIL"
        elif any(o is None for o in outcomes):
            status = "NOT RUN"
        else:
            status = "PASS"
        detail = f" ({failed} of {len(outcomes)} checks failed)" if failed else ""
        terminalreporter.write_line(f"criterion {number:2d} {status:7s} {entry['title']}{detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
