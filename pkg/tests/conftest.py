import pytest

from tmotive_lab.drinfeld import DrinfeldModule
from tmotive_lab.ffbase import ExactCoef, FieldSpec
from tmotive_lab.motive import default_periods, psi_rho


def make_module(p, m, kappa, D=None, name=""):
    r = len(kappa)
    spec = FieldSpec(p, 1, m, r if D is None else D)
    return DrinfeldModule(spec, tuple(ExactCoef.scalar(spec, k) for k in kappa), name)


@pytest.fixture(scope="session")
def carlitz3():
    """Carlitz module with q = 3 over F_9."""
    return make_module(3, 2, (1,), name="carlitz3")


@pytest.fixture(scope="session")
def cm4():
    """rho_t = theta + tau^2 with q = 2 over F_4."""
    return make_module(2, 2, (0, 1), name="cm4")


@pytest.fixture(scope="session")
def carlitz2():
    """Carlitz module with q = 2 over F_2."""
    return make_module(2, 1, (1,), name="carlitz2")


@pytest.fixture(scope="session")
def psi_carlitz3(carlitz3):
    return psi_rho(carlitz3, default_periods(carlitz3, 40), 12, 40)


@pytest.fixture(scope="session")
def psi_cm4(cm4):
    return psi_rho(cm4, default_periods(cm4, 40), 12, 40)


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE_LINES

    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
