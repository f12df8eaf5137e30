import numpy as np
import pytest

from depthlayer import make_depth_map


def depth_from_rows(rows, max_level=255):
    arr = np.asarray(rows)
    return make_depth_map(arr.shape[1], arr.shape[0], max_level, arr.reshape(-1))


U_SHAPE = [[10, 99, 10], [10, 99, 10], [10, 10, 10]]


@pytest.fixture
def u_shape():
    return depth_from_rows(U_SHAPE)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
