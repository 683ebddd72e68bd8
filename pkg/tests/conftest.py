import numpy as np
import pytest

from loosecore.hypergraph import Hypergraph, ModelParams, sample_hypergraph

ACCEPTANCE_LINES: list[str] = []


def random_hypergraph(n: int, r: int, d: float, seed: int) -> Hypergraph:
    return sample_hypergraph(ModelParams.from_degree(r, n, d, seed))


@pytest.fixture
def cycle3():
    return Hypergraph(6, 3, [[0, 1, 2], [2, 3, 4], [4, 5, 0]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
