import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "slicekit",
    deadline=None,
    max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("slicekit")


@pytest.fixture
def rng():
    return np.random.default_rng(0x5EED)


# lines recorded by the acceptance module, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
