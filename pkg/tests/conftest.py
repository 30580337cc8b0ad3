import numpy as np
import pytest

from terrainlink import TerrainProfile

_acceptance_results = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        number, title = marker.args
        _acceptance_results.append((number, title, item.name, report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    by_criterion = {}
    for number, title, name, outcome in _acceptance_results:
        entry = by_criterion.setdefault(number, [title, [], []])
        entry[1 if outcome == "passed" else 2].append(name)
    terminalreporter.section("acceptance criteria")
    for number in sorted(by_criterion):
        title, passed, failed = by_criterion[number]
        tag = "FAIL" if failed else "PASS"
        detail = f"failed: {', '.join(failed)}" if failed else f"{len(passed)}/{len(passed)} tests"
        terminalreporter.write_line(f"[{tag}] AC{number:>2} {title} ({detail})")


def hill_points(length_m=40000.0, n=81, base=100.0, peak=300.0, width=3000.0):
    d = np.linspace(0.0, length_m, n)
    e = base + peak * np.exp(-(((d - length_m / 2) / width) ** 2))
    return d, e


@pytest.fixture
def hill_profile():
    d, e = hill_points()
    return TerrainProfile(tuple(d), tuple(e))


@pytest.fixture
def flat_profile():
    return TerrainProfile((0.0, 500.0, 1000.0), (100.0, 100.0, 100.0))
