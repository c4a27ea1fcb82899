import numpy as np
import pytest

from hyperjac.periods import BranchConfig, period_matrix

GENUS3_BRANCHES = (-4.0, -3.0, -1.0, 0.5, 1.0, 2.5, 3.0, 5.0)
GENUS4_BRANCHES = (-5.0, -3.5, -2.0, -1.2, 0.0, 0.7, 1.9, 3.0, 4.1, 6.0)


def random_branches(g, rng):
    """Increasing reals with gaps uniform on [0.5, 2], centred at zero."""
    pts = np.cumsum(rng.uniform(0.5, 2.0, 2 * g + 2))
    return tuple(pts - pts.mean())


@pytest.fixture(scope="session")
def tau3():
    return period_matrix(BranchConfig(GENUS3_BRANCHES)).tau


@pytest.fixture(scope="session")
def tau4():
    return period_matrix(BranchConfig(GENUS4_BRANCHES)).tau


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# acceptance criteria record a line here; printed once at the end of the run
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
