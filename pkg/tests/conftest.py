import itertools
import math

import pytest


def naive_count(alpha, d, M, N, xi, tau, sigma):
    """Direct loop over prefixes and an explicit safe range of m_d."""
    lo = float(xi) + float(tau) / N
    hi = float(xi) + float(tau + sigma) / N
    total = 0
    for m in itertools.product(range(1, M + 1), repeat=d - 1):
        v = sum(mi * ai for mi, ai in zip(m, alpha))
        for md in range(math.floor(lo - v) - 2, math.ceil(hi - v) + 3):
            if lo < v + md < hi:
                total += 1
    return total


@pytest.fixture
def brute():
    return naive_count


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
