import numpy as np
import pytest

from gqp.problem import REGISTRY_PROBLEMS, make_problem


@pytest.fixture
def heat_1d():
    return REGISTRY_PROBLEMS["heat_1d"]


@pytest.fixture
def sine_gauss_1d():
    return REGISTRY_PROBLEMS["sine_gauss_1d"]


@pytest.fixture
def zero_data_1d():
    return make_problem(1, ("sine", {"a": 1.0}), ("gauss_bump", {"theta": 1.0}),
                        ("parabola", {"amplitude": 0.0}))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, filled by tests/test_acceptance.py
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[n])
