import random

import pytest
from hypothesis import strategies as st

from arcflow_csp.instance import Instance


@pytest.fixture
def worked():
    """W=8, widths 4/3/2, demands 3/2/5."""
    return Instance.from_pairs(8, [(4, 3), (3, 2), (2, 5)])


def random_instance(rng: random.Random, max_m: int, max_w: int, max_b: int = 5, min_m: int = 1) -> Instance:
    W = rng.randint(1, max_w)
    m = rng.randint(min_m, max_m)
    return Instance.from_pairs(W, [(rng.randint(1, W), rng.randint(1, max_b)) for _ in range(m)])


@st.composite
def instances(draw, max_m=8, max_w=20, max_b=5, min_m=0):
    W = draw(st.integers(1, max_w))
    pairs = draw(st.lists(st.tuples(st.integers(1, W), st.integers(1, max_b)),
                          min_size=min_m, max_size=max_m))
    return Instance.from_pairs(W, pairs)


def pytest_terminal_summary(terminalreporter):
    from . import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
