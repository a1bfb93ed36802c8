import numpy as np
import pytest

from perfenvelope import CheckpointSchedule, QualityMatrix

SCHED = CheckpointSchedule()


def geometric_profile(start, final, rate, count=11):
    k = np.arange(count)
    return final + (start - final) * np.exp(-rate * k)


@pytest.fixture
def schedule():
    return SCHED


@pytest.fixture
def five_matrix():
    """Five monotone profiles; final order by id is 1, 3, 2, 0, 4 (0.145, 0.179, 0.250, 0.305, 0.400)."""
    rows = [geometric_profile(1.0, f, r) for f, r in
            [(0.3, 0.5), (0.1, 0.3), (0.25, 0.9), (0.05, 0.2), (0.4, 1.2)]]
    return QualityMatrix(SCHED, tuple(range(5)), np.array(rows))


_criteria = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker
        _criteria[(number, report.nodeid)] = (title, report.outcome, getattr(report, "detail", ""))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = tuple(mark.args)
        report.detail = getattr(item, "criterion_detail", "")


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for (number, _), (title, outcome, detail) in sorted(_criteria.items()):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] criterion {number}: {title}" + (f" -- {detail}" if detail else ""))
