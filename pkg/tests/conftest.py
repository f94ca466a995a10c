import numpy as np
import pytest

from oseenlab.fields import QuadratureSet
from oseenlab.geometry import disk, ellipse


@pytest.fixture(scope="session")
def unit_disk():
    return disk()


@pytest.fixture(scope="session")
def ell():
    return ellipse(2.0, 1.0)


@pytest.fixture(scope="session")
def disk_quad(unit_disk):
    return QuadratureSet(unit_disk, degree=8)


@pytest.fixture(scope="session")
def ell_quad(ell):
    return QuadratureSet(ell, degree=8)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
