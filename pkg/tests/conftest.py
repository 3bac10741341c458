import pytest

from lff import FieldParams


@pytest.fixture(params=[(2, 1), (3, 1), (2, 2)], ids=["q2", "q3", "q4"])
def params(request):
    return FieldParams(*request.param)


@pytest.fixture
def q2():
    return FieldParams(2, 1)


@pytest.fixture
def q3():
    return FieldParams(3, 1)


ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
