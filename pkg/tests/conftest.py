import numpy as np
import pytest

from oscindex.geometry import OscillationSpec
from oscindex.symbols import ExtendedElement, projection_p, projection_q


@pytest.fixture
def pquh():
    def make(h=1.0, rho=1.0):
        osc = OscillationSpec(h, rho)
        rp = osc.default_rho_prime
        return ExtendedElement(projection_p(rp), projection_q(rp), osc, "P+QU_h")

    return make


@pytest.fixture(autouse=True)
def _quiet_overflow():
    # exp(pi t) at t = +-inf is intended; silence only overflow noise
    with np.errstate(over="ignore"):
        yield


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
