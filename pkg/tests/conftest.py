import math

import pytest

from neckforge import limitode as LO
from neckforge import potentials as PT


@pytest.fixture(scope="session")
def pair():
    return LO.obstruction_pair(2)


@pytest.fixture(scope="session")
def L_inf():
    return LO.assemble_L_infinity(PT.limit_profile(2))


@pytest.fixture(scope="session")
def horn():
    """Reference horn: n = 2, a = -log 2, tau = -10, b = -1e-6."""
    return PT.solve_horn(2, -math.log(2), -1e-6, -10.0)[0]


# one PASS/FAIL line per acceptance criterion, printed after the run
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        terminalreporter.write_line(ACCEPTANCE[k])
