import numpy as np
import pytest

from casorati.slant_model import SecondFundamentalForm, make_instance
from casorati.verifier import equality_instance

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def eq_instance():
    """n=4, m=2, r=6, a=1, c=0: A_5 = diag(1, 1, 1, 2), other shape operators zero."""
    return equality_instance(4, 2, 6.0, 1.0, c=0.0, theta=np.pi / 4)


@pytest.fixture
def zero_instance():
    def build(n=4, m=2, c=0.0, theta=np.pi / 4):
        return make_instance(n, m, c, theta, SecondFundamentalForm.zeros(n, 4 * m - n))

    return build


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
