import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from cyclepart.digraph import Digraph
from cyclepart.partition import CellPartition

settings.register_profile(
    "default", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")


@st.composite
def digraphs(draw, max_n=10, min_n=1):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(n) for v in range(n) if u != v]
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Digraph(n, [e for e, keep in zip(pairs, mask) if keep])


@st.composite
def partitions(draw, n, max_k=4):
    k = draw(st.integers(1, max_k))
    assign = draw(st.lists(st.tuples(st.integers(0, k - 1), st.integers(0, k - 1)), min_size=n, max_size=n))
    return CellPartition.from_assignment(k, assign)


@pytest.fixture
def rng():
    return random.Random(12345)
