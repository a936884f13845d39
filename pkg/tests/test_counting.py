import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import naive_count
from rotvisits.counting import (
    BoxSpec,
    IntervalSpec,
    boundary_hits,
    count_batch,
    count_visits,
    count_visits_joint,
    integer_root,
)
from rotvisits.spectrum import CenterSymbol

SQRT2 = CenterSymbol.irrational("sqrt2")


def test_degenerate_alpha_misses_interval():
    assert count_visits([0.0], BoxSpec.from_N(2, 10), IntervalSpec("1/2", 0, 2)) == 0


def test_third_rotation_hits_once_per_period():
    # orbit 1/3, 2/3, 0, ... ; only 1/3 lies in (0, 1/2), at m = 1, 4, 7
    box = BoxSpec.from_N(2, 9)
    assert box.M == 9
    assert count_visits([1 / 3], box, IntervalSpec("0", 0, 4.5)) == 3


def test_length_two_interval_has_two_integers_per_prefix():
    box = BoxSpec.from_M(3, 4)
    assert box.N == 16
    iv = IntervalSpec(SQRT2, 0, 2 * box.N)
    assert count_visits([0.1234, 0.771], box, iv) == 32
    assert naive_count([0.1234, 0.771], 3, 4, 16, SQRT2, 0, 32) == 32


def test_joint_matches_brute_force():
    box = BoxSpec.from_N(2, 9)
    ivs = [IntervalSpec("0", 0, 4.5), IntervalSpec("1/2", 0, 2)]
    # second target is (0.5, 0.722...), which contains 2/3 (m = 2, 5, 8)
    expected = tuple(naive_count([1 / 3], 2, 9, 9, iv.xi, iv.tau, iv.sigma) for iv in ivs)
    assert expected == (3, 3)
    assert count_visits_joint([1 / 3], box, ivs) == expected


def test_joint_duplicates_and_single():
    box = BoxSpec.from_M(3, 7)
    iv = IntervalSpec(SQRT2, Fraction(1, 3), 5)
    a, b = count_visits_joint([0.3, 0.62], box, [iv, iv])
    assert a == b == count_visits([0.3, 0.62], box, iv)


@pytest.mark.parametrize(
    "make",
    [
        lambda: BoxSpec(1, 3, 3),
        lambda: BoxSpec(3, 0, 1),
        lambda: BoxSpec.from_N(1, 10),
        lambda: IntervalSpec("0", 0, 0),
        lambda: IntervalSpec("0", 0, -1),
    ],
)
def test_rejects_malformed(make):
    with pytest.raises(ValueError):
        make()


def test_rejects_wrong_alpha_length_and_narrow_targets():
    box = BoxSpec.from_M(3, 5)
    with pytest.raises(ValueError):
        count_visits([0.1], box, IntervalSpec("0", 0, 1))
    with pytest.raises(ValueError):
        count_visits([0.1, 0.2], BoxSpec(2, 1, 1e12), IntervalSpec("0", 0, 1))
    with pytest.raises(ValueError):
        count_visits_joint([0.1, 0.2], box, [])


@pytest.mark.parametrize("N,k,expected", [(1000, 3, 10), (999, 3, 9), (10**4, 1, 10**4), (2187, 7, 3),
                                          (2186, 7, 2), (16, 2, 4), (10.5, 2, 3), (0.5, 2, 0)])
def test_integer_root(N, k, expected):
    assert integer_root(N, k) == expected


@given(st.integers(1, 10**12), st.integers(1, 7))
def test_integer_root_brackets(N, k):
    m = integer_root(N, k)
    assert m**k <= N < (m + 1) ** k


alphas = st.floats(0, 1, exclude_max=True, allow_subnormal=False)
centers = st.sampled_from(["irr:sqrt2", "irr:golden", "irr:e", "irr:pi-frac"])


@settings(max_examples=60, deadline=None)
@given(
    d=st.integers(2, 3),
    M=st.integers(1, 30),
    data=st.data(),
    xi=centers,
    tau=st.fractions(-5, 5, max_denominator=7),
    sigma=st.fractions(Fraction(1, 10), 40, max_denominator=10),
)
def test_matches_naive_loop(d, M, data, xi, tau, sigma):
    alpha = data.draw(st.lists(alphas, min_size=d - 1, max_size=d - 1))
    box = BoxSpec.from_M(d, M)
    iv = IntervalSpec(xi, tau, sigma)
    assert count_visits(alpha, box, iv) == naive_count(alpha, d, M, box.N, iv.xi, tau, sigma)


@settings(max_examples=60, deadline=None)
@given(alpha=st.lists(alphas, min_size=2, max_size=2), xi=centers,
       s1=st.fractions(Fraction(1, 10), 20), s2=st.fractions(Fraction(1, 10), 20))
def test_monotone_in_sigma(alpha, xi, s1, s2):
    box = BoxSpec.from_M(3, 9)
    small, big = sorted([s1, s2])
    assert count_visits(alpha, box, IntervalSpec(xi, 0, small)) <= count_visits(alpha, box, IntervalSpec(xi, 0, big))


@settings(max_examples=40, deadline=None)
@given(alpha=st.lists(alphas, min_size=2, max_size=2), k=st.integers(-3, 3), tau=st.fractions(-3, 3))
def test_shift_by_whole_turns(alpha, k, tau):
    box = BoxSpec.from_M(3, 8)  # N = 64
    a = count_visits(alpha, box, IntervalSpec(SQRT2, tau, 2))
    b = count_visits(alpha, box, IntervalSpec(SQRT2, tau + box.N * k, 2))
    assert a == b


@settings(max_examples=60, deadline=None)
@given(alpha=st.lists(alphas, min_size=2, max_size=2), xi=st.sampled_from(["0", "1/3", "irr:sqrt2"]),
       tau=st.fractions(-2, 2, max_denominator=4),
       s1=st.fractions(Fraction(1, 4), 6, max_denominator=4), s2=st.fractions(Fraction(1, 4), 6, max_denominator=4))
def test_additive_up_to_boundary_hits(alpha, xi, tau, s1, s2):
    box = BoxSpec.from_M(3, 6)
    left = count_visits(alpha, box, IntervalSpec(xi, tau, s1))
    right = count_visits(alpha, box, IntervalSpec(xi, tau + s1, s2))
    whole = count_visits(alpha, box, IntervalSpec(xi, tau, s1 + s2))
    hits = boundary_hits(alpha, box, CenterSymbol.parse(xi), tau + s1)
    assert left + right == whole - hits


def test_boundary_hit_detected():
    # alpha = 0: every prefix sits at 0, the shared endpoint of (-1, 0) and (0, 1)
    box = BoxSpec.from_M(3, 4)
    assert boundary_hits([0.0, 0.0], box, CenterSymbol.rational(0), 0) == 16
    left = count_visits([0.0, 0.0], box, IntervalSpec("0", -1, 1))
    right = count_visits([0.0, 0.0], box, IntervalSpec("0", 0, 1))
    whole = count_visits([0.0, 0.0], box, IntervalSpec("0", -1, 2))
    assert (left, right, whole) == (0, 0, 16)


def test_exact_mean_when_N_is_not_a_power():
    box = BoxSpec.from_N(3, 150)
    assert box.M == 12
    rng = np.random.default_rng(5)
    counts = count_batch(rng.random((10_000, 2)), box, [IntervalSpec(SQRT2, 0, 3)])[:, 0]
    target = box.prefixes * 3 / box.N
    se = counts.std(ddof=1) / math.sqrt(counts.size)
    assert abs(counts.mean() - target) < 4 * se


def test_batch_is_row_independent():
    box = BoxSpec.from_M(4, 6)
    rng = np.random.default_rng(9)
    alphas = rng.random((50, 3))
    ivs = [IntervalSpec(SQRT2, 0, 2), IntervalSpec("1/5", -1, 3)]
    whole = count_batch(alphas, box, ivs)
    rows = np.array([count_visits_joint(a, box, ivs) for a in alphas])
    assert np.array_equal(whole, rows)
