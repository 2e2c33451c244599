import pytest

from airs.pipeline import solve
from airs.scenario import ScenarioConfig, make_grid

_acceptance_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(label): exit criterion, reported in the terminal summary")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.failed):
        label = marker.args[0]
        # parametrised criteria pass only if every case passes
        _acceptance_results[label] = _acceptance_results.get(label, True) and report.passed


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed in _acceptance_results.items():
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}")


@pytest.fixture(scope="session")
def cfg():
    return ScenarioConfig()


@pytest.fixture(scope="session")
def grid(cfg):
    return make_grid(cfg)


@pytest.fixture(scope="session")
def solved(cfg, grid):
    """Default-scenario solution, shared because the line search takes ~1.5 s."""
    return solve(cfg, grid=grid)
