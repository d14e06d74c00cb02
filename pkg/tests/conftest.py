import pytest

from lipwalk.lip_core import PendulumParams

ACCEPTANCE_RESULTS = []


@pytest.fixture
def params():
    return PendulumParams(mass=32.0, com_height=0.9, step_duration=0.4, gravity=9.81)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(line)
