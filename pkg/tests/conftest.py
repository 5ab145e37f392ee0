import numpy as np
import pytest

from nvqst.device import DeviceParams, NoiseParams, ReadoutCalibration

_ACCEPTANCE = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


@pytest.fixture
def calib():
    return ReadoutCalibration(0.03, 0.021)


@pytest.fixture
def device1():
    return DeviceParams(n=1)


@pytest.fixture
def device2():
    return DeviceParams(n=2)


@pytest.fixture
def noise():
    return NoiseParams()


@pytest.fixture
def criterion(request):
    """Record one pass/fail line per acceptance criterion for the terminal summary."""
    entry = {"name": request.node.name, "doc": "", "ok": False}

    def report(text):
        entry["doc"] = text

    yield report
    rep = getattr(request.node, "rep_call", None)
    entry["ok"] = bool(rep and rep.passed)
    line = f"[{'PASS' if entry['ok'] else 'FAIL'}] {entry['doc'] or entry['name']}"
    _ACCEPTANCE.append(line)
    print(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
