import math

import pytest

from oscfun.hamiltonians import builtin


@pytest.fixture
def ident():
    return builtin("identity")


@pytest.fixture
def er():
    return builtin("einstein_rosen")


@pytest.fixture
def kerr1():
    return builtin("kerr", chi=1.0)


SQRT2 = math.sqrt(2.0)


_ACCEPTANCE = []


@pytest.fixture
def criterion(capsys):
    """Record one PASS/FAIL line per acceptance criterion, then assert it."""

    def check(number, title, ok, detail):
        line = f"criterion {number:2d} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
        _ACCEPTANCE.append(line)
        with capsys.disabled():
            print("\n" + line, end="")
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
