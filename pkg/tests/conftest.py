import os

import pytest

from sobolhdc.sobol import default_table

_CRITERIA: dict[str, tuple[str, str]] = {}
_DETAILS: dict[str, list[str]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")
    config.addinivalue_line("markers", "slow: long-running experiment-scale test")


def pytest_runtest_logreport(report):
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        marker = _MARKERS.get(report.nodeid)
        if marker is not None:
            key = marker[0]
            prev = _CRITERIA.get(key, ("PASS", marker[1]))[0]
            outcome = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
            if prev == "FAIL" or (prev == "SKIP" and outcome == "PASS"):
                outcome = prev
            _CRITERIA[key] = (outcome, marker[1])


_MARKERS: dict[str, tuple[str, str]] = {}


def pytest_collection_modifyitems(items):
    for item in items:
        m = item.get_closest_marker("criterion")
        if m is not None:
            _MARKERS[item.nodeid] = (str(m.args[0]), m.args[1])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA, key=lambda k: int(k)):
        outcome, title = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {key}: {outcome}  {title}")
        for line in _DETAILS.get(key, []):
            terminalreporter.write_line(f"    {line}")


@pytest.fixture
def note(request):
    """Attach a measurement line to the criterion summary."""
    m = request.node.get_closest_marker("criterion")
    key = str(m.args[0]) if m else "?"

    def _note(text):
        _DETAILS.setdefault(key, []).append(text)

    return _note


@pytest.fixture(scope="session")
def table():
    return default_table()


@pytest.fixture
def rng():
    return __import__("numpy").random.default_rng(12345)


def env_path(name):
    value = os.environ.get(name)
    return value if value else None
