import itertools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


def brute_lines(n, F):
    """Every affine line of AG(n, q) as a frozenset of point tuples (oracle)."""
    pts = list(itertools.product(range(F.order), repeat=n))
    lines = set()
    for base in pts:
        for d in pts:
            if any(d):
                line = frozenset(
                    tuple(F.add(F.mul(x, di), bi) for di, bi in zip(d, base)) for x in range(F.order)
                )
                lines.add(line)
    return lines


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for num in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[num])
