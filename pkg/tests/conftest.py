import numpy as np
import pytest

from binrank.forms import BinaryForm, LinearForm, binomials


def kostlan(rng, d, complex_=False):
    c = rng.normal(size=d + 1)
    if complex_:
        c = c + 1j * rng.normal(size=d + 1)
    return BinaryForm(c * np.sqrt(binomials(d)))


def random_linear(rng, complex_=False):
    a, b = rng.normal(size=2)
    if complex_:
        a, b = a + 1j * rng.normal(), b + 1j * rng.normal()
    return LinearForm(a, b)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# pass/fail lines from the acceptance suite, echoed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
