import numpy as np
import pytest

from dynpr.graph import build_transition, load_edge_list

FOUR_EDGES = b"0 2\n1 2\n2 1\n2 3\n3 0\n3 1\n"
# adjacency of the 4-node example graph, A[i, j] = 1 for edge i -> j
FOUR_A = np.array([[0, 0, 1, 0], [0, 0, 1, 0], [0, 1, 0, 1], [1, 1, 0, 0]], dtype=float)
FOUR_S_MAGNITUDE = np.array([0.0216, 0.0261, 0.0122, 0.0235])


def dense_transition(A):
    """Oracle: P = A^T D^{-1}, zero columns replaced by 1/n."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    deg = A.sum(axis=1)
    P = np.empty((n, n))
    for i in range(n):
        P[:, i] = A[i] / deg[i] if deg[i] > 0 else 1.0 / n
    return P


@pytest.fixture
def four_adj():
    return load_edge_list(FOUR_EDGES)


@pytest.fixture
def four_P(four_adj):
    return build_transition(four_adj)


@pytest.fixture
def eye4():
    return np.eye(4)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
