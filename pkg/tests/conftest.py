import math

import pytest

from armchair.potential import Potential


@pytest.fixture(scope="session")
def q_zero():
    return Potential.zero()


@pytest.fixture(scope="session")
def q_cos():
    return Potential.fourier([1.0])


@pytest.fixture(scope="session")
def q_odd():
    """A smooth potential that is not even."""
    return Potential.fourier([1.0, 0.5], [0.7, -0.4])


@pytest.fixture(scope="session")
def q_delta():
    return Potential.delta_pair_shift(0.01)


def rel(a, b):
    return abs(a - b) / max(1.0, abs(b))


PI = math.pi


# -- acceptance report ------------------------------------------------------

ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        title, ok, secs, note = ACCEPTANCE[num]
        line = f"criterion {num:2d} {'PASS' if ok else 'FAIL'}  {secs:7.2f}s  {title}"
        terminalreporter.write_line(line + (f"  [{note}]" if note else ""))
