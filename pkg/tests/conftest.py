import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from dqi.f2linalg import BitMatrix, BitVector

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def bit_matrices(draw, max_rows=8, max_cols=8, min_rows=1, min_cols=1):
    rows = draw(st.integers(min_rows, max_rows))
    cols = draw(st.integers(min_cols, max_cols))
    data = draw(st.lists(st.integers(0, 2**cols - 1), min_size=rows, max_size=rows))
    return BitMatrix(rows, cols, tuple(data))


@st.composite
def bit_vectors(draw, length):
    return BitVector(tuple(draw(st.lists(st.integers(0, 1), min_size=length, max_size=length))))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_state(n, rng):
    from dqi.simulator import QuantumState

    v = rng.normal(size=2**n) + 1j * rng.normal(size=2**n)
    return QuantumState.from_dense(v / np.linalg.norm(v))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
