import numpy as np
import pytest

ASTM_SEQUENCE = [-2.0, 1.0, -3.0, 5.0, -1.0, 3.0, -4.0, 4.0, -2.0]


@pytest.fixture
def astm_sequence():
    return np.array(ASTM_SEQUENCE)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# acceptance criterion number -> (title, passed); filled from test outcomes
_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    m = item.get_closest_marker("acceptance")
    if m is None or not (rep.when == "call" or rep.failed):
        return
    n, title = m.args
    ok = rep.passed and _acceptance.get(n, (title, True))[1]
    _acceptance[n] = (title, ok)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for n in sorted(_acceptance):
        title, ok = _acceptance[n]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {n:2d}: {title}")
