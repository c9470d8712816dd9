from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from edgecil.simio import SimilarityMatrix, load_embeddings

FIXTURES = Path(__file__).parent / "fixtures"


def random_sim(n, rng, low=0.0, high=1.0):
    a = rng.uniform(low, high, size=(n, n))
    a = np.triu(a, 1)
    a = a + a.T
    np.fill_diagonal(a, 1.0)
    return SimilarityMatrix.from_array(a)


def block_matrix():
    g = np.full((4, 4), 0.1)
    g[:2, :2] = g[2:, 2:] = 0.9
    np.fill_diagonal(g, 1.0)
    return SimilarityMatrix.from_array(g)


@st.composite
def nk_pairs(draw, max_n=8):
    k = draw(st.integers(1, 4))
    m = draw(st.integers(1, max(1, max_n // k)))
    return m * k, k


@st.composite
def sim_matrices(draw, n):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_sim(n, np.random.default_rng(seed))


@pytest.fixture
def block4():
    return block_matrix()


@pytest.fixture(scope="session")
def cifar6():
    return load_embeddings(FIXTURES / "cifar6_embeddings.csv")


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":").lstrip("C"))):
            terminalreporter.write_line(line)
