import sys

import pytest

from cayleykit.exterior import EXACT, FLOAT
from cayleykit.kahler import build_model
from cayleykit.spin7 import phi0, phi_from_kahler


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print the one-line-per-criterion record of the acceptance gate."""
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE_LINES", None) if mod else None
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def exact_model():
    return build_model(4, backend=EXACT)


@pytest.fixture(scope="session")
def float_model():
    return build_model(4, backend=FLOAT)


@pytest.fixture(scope="session")
def phi_exact():
    return phi0(backend=EXACT)


@pytest.fixture(scope="session")
def phi_float():
    return phi0(backend=FLOAT)


@pytest.fixture(scope="session")
def phi_cy_exact(exact_model):
    return phi_from_kahler(exact_model)


@pytest.fixture(scope="session")
def phi_cy_float(float_model):
    return phi_from_kahler(float_model)
