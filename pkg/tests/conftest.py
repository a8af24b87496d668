import sys

import pytest

from torsormodels.localfield.field import FieldSpec
from torsormodels.localfield.series import LaurentSeries, parse_series


@pytest.fixture
def F2():
    return FieldSpec(2)


@pytest.fixture
def F3():
    return FieldSpec(3)


def series(text, F):
    return parse_series(text, F)


def t_of(F):
    return LaurentSeries.gen(F)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(mod, "RESULT_LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
