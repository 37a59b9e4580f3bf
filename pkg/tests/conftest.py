import pytest

from kinkstatics import make_phi4, make_sine_gordon


@pytest.fixture(scope="session")
def phi4():
    return make_phi4()


@pytest.fixture(scope="session")
def sg():
    return make_sine_gordon()


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
