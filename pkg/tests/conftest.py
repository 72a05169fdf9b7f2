import random

import pytest

from closedforms.multiindex import MultiIndex


@pytest.fixture
def rng():
    return random.Random(20240611)


def random_index(rng: random.Random, N: int, lo: int = -6, hi: int = 6) -> MultiIndex:
    return MultiIndex.from_sites(rng.randint(lo, hi) for _ in range(N))


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
