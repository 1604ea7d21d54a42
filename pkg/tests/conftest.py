import numpy as np
import pytest

from ggcport.mixing import Gig
from ggcport.models import MarketSpec, NmvmModel

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def canonical_model():
    return NmvmModel(
        [0.05, 0.08], [0.1, -0.05], [[0.2, 0.05], [0.05, 0.3]], Gig(1.0, 1.0, 2.0)
    )


@pytest.fixture
def canonical_market():
    return MarketSpec(0.01, 1.0, 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
