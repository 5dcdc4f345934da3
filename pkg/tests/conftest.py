import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run the test once per kernel backend, switched the same way users do."""
    monkeypatch.setenv("MULTCODE_NUMBA", "1" if request.param == "numba" else "0")
    return request.param


_CRITERIA: dict = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion checked by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    ok, notes = _CRITERIA.get(mark.args[0], (True, []))
    ok = ok and rep.passed
    notes = notes + [v for k, v in item.user_properties if k == "detail" and rep.when == "call"]
    _CRITERIA[mark.args[0]] = (ok, notes)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, notes = _CRITERIA[n]
        terminalreporter.write_line("criterion %d: %s%s" % (n, "PASS" if ok else "FAIL", "  (" + "; ".join(notes) + ")" if notes else ""))
