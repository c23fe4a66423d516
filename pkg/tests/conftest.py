import random

import pytest
from hypothesis import strategies as st

from intfam.core import random_intersecting

ACCEPTANCE_LINES: list[str] = []


@st.composite
def intersecting_families(draw, max_n=9, max_k=4):
    k = draw(st.integers(2, max_k))
    n = draw(st.integers(k + 1, max_n))
    seed = draw(st.integers(0, 2**32))
    rng = random.Random(seed)
    size = draw(st.integers(1, 40))
    return random_intersecting(n, k, rng, size)


@pytest.fixture
def rng():
    return random.Random(20261017)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
