import numpy as np
import pytest
from hypothesis import settings

from xdiff.grid import State, make_grid
from xdiff.model import new_model

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@pytest.fixture
def muskat():
    return new_model(1.0, 1.0, 1.0, 2.0)


@pytest.fixture
def unit_grid():
    return make_grid(0.0, 1.0, 64)


@pytest.fixture
def smooth_state(unit_grid):
    x = unit_grid.cell_centers
    return State(unit_grid, 1.0 + 0.5 * np.cos(np.pi * x), 1.0 - 0.4 * np.cos(2 * np.pi * x))


def pytest_terminal_summary(terminalreporter):
    from tests import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
