import pytest
from hypothesis import settings

from helpers import unknot

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: list = []


@pytest.fixture(scope="session", params=[2, 3], ids=["n2", "n3"])
def unknot_data(request):
    return unknot(request.param)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
