import itertools
import math
import random
from math import gcd

import mpmath
import pytest
from hypothesis import assume, given, settings, strategies as st

from rotvisits.numbertheory import (
    count_reduced_matrices,
    enumerate_reduced_matrices,
    factorize,
    hermite_column_decompose,
    integer_det,
    is_reduced_matrix,
    is_saturated,
    lattice_covolume,
    matmul,
    pairing_p2,
    pairing_pn,
    phi_k,
    phi_k_bruteforce,
    phi_k_enumerate,
    unpair_p2,
    unpair_pn,
    zeta,
    zeta_ratio_check,
)


def test_factorize():
    assert factorize(1) == {}
    assert factorize(360) == {2: 3, 3: 2, 5: 1}
    assert factorize(97) == {97: 1}
    with pytest.raises(ValueError):
        factorize(0)


def test_phi_examples():
    assert phi_k(1, 1) == 1
    assert phi_k(1, 12) == 4
    assert phi_k(2, 2) == 3
    assert phi_k(2, 4) == 12
    assert phi_k(0, 30) == 1
    with pytest.raises(ValueError):
        phi_k(1, 0)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_phi_matches_enumeration(k):
    for n in range(1, 25 if k < 3 else 14):
        assert phi_k(k, n) == phi_k_bruteforce(k, n) == phi_k_enumerate(k, n)


@given(st.integers(1, 300), st.integers(1, 300), st.integers(1, 4))
def test_phi_multiplicative(a, b, k):
    assume(gcd(a, b) == 1)
    assert phi_k(k, a * b) == phi_k(k, a) * phi_k(k, b)


@given(st.integers(1, 500))
def test_phi_one_is_euler_totient(n):
    assert phi_k(1, n) == sum(1 for j in range(n) if gcd(j, n) == 1)


@pytest.mark.parametrize("s", [2, 2.5, 3, 4, 6, 10])
def test_zeta_matches_mpmath(s):
    assert zeta(s) == pytest.approx(float(mpmath.zeta(s)), rel=1e-13)


def test_zeta_ratio_identities():
    check = zeta_ratio_check(0, 3, 1000)
    assert check.target == pytest.approx(1.0)
    assert check.ok
    check = zeta_ratio_check(2, 4, 10**5)
    assert check.target == pytest.approx(15 / math.pi**2, rel=1e-13)
    check = zeta_ratio_check(1, 5, 10**6)
    assert abs(check.partial_sum - check.target) < 1e-6
    with pytest.raises(ValueError):
        zeta_ratio_check(2, 3, 10)


def test_integer_det():
    assert integer_det([[2, 0], [0, 3]]) == 6
    assert integer_det([[0, 1], [1, 0]]) == -1
    assert integer_det([[1, 2, 3], [4, 5, 6], [7, 8, 10]]) == -3


def test_hermite_examples():
    f = hermite_column_decompose([[2], [4], [6]])
    assert f.t == (2,)
    assert f.A == ((1,),)
    assert f.reconstruct() == [[2], [4], [6]]
    f = hermite_column_decompose([[1, 0], [0, 1], [0, 0]])
    assert f.A == ((1, 0), (0, 1))
    assert integer_det(f.Nmat) == 1
    with pytest.raises(ValueError):
        hermite_column_decompose([[1, 2], [2, 4], [3, 6]])
    with pytest.raises(ValueError):
        hermite_column_decompose([[1, 0], [0, 1]])


def random_unimodular(rnd, d):
    u = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(3 * d):
        i, j = rnd.sample(range(d), 2)
        q = rnd.randint(-3, 3)
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]
    return u


@st.composite
def full_rank(draw):
    d = draw(st.integers(2, 5))
    r = draw(st.integers(1, d - 1))
    rows = draw(st.lists(st.lists(st.integers(-9, 9), min_size=r, max_size=r), min_size=d, max_size=d))
    gram = [[sum(rows[i][a] * rows[i][b] for i in range(d)) for b in range(r)] for a in range(r)]
    assume(integer_det(gram) != 0)
    return rows


@settings(max_examples=150, deadline=None)
@given(full_rank(), st.randoms())
def test_hermite_reconstructs_and_is_unique(m, rnd):
    f = hermite_column_decompose(m)
    assert f.reconstruct() == m
    assert integer_det(f.Nmat) == 1
    assert is_reduced_matrix(f.A)
    assert all(t > 0 for t in f.t)
    # primitive columns are determined up to the same unimodular change
    moved = matmul(random_unimodular(rnd, len(m)), m)
    g = hermite_column_decompose(moved)
    assert g.A == f.A and g.t == f.t


def test_reduced_counts_examples():
    assert count_reduced_matrices([1]) == 1
    assert count_reduced_matrices([1, 4]) == 2
    assert sorted(A[0][1] for A in enumerate_reduced_matrices([1, 4])) == [1, 3]
    assert count_reduced_matrices([1, 2, 3]) == 8
    with pytest.raises(ValueError):
        count_reduced_matrices([2, 1])


def test_reduced_counts_match_literal_search():
    for r in range(1, 4):
        for diag in itertools.product(range(1, 5), repeat=r - 1):
            diag = (1, *diag)
            entries = [range(a) for j, a in enumerate(diag) for _ in range(j)]
            found = 0
            for picks in itertools.product(*entries):
                A = [[0] * r for _ in range(r)]
                it = iter(picks)
                for j in range(r):
                    for i in range(j):
                        A[i][j] = next(it)
                    A[j][j] = diag[j]
                found += is_reduced_matrix(A)
            assert found == count_reduced_matrices(diag) == sum(1 for _ in enumerate_reduced_matrices(diag))


def test_covolume_and_saturation():
    assert lattice_covolume([[1, 0], [0, 1], [0, 0]]) == 1.0
    assert lattice_covolume([[1], [1], [0]]) == pytest.approx(math.sqrt(2))
    assert lattice_covolume([[2], [0]]) == 2.0
    assert is_saturated([[1], [1], [0]])
    assert not is_saturated([[2], [0], [0]])
    assert not is_saturated([[1, 1], [1, -1], [0, 0]])
    with pytest.raises(ValueError):
        lattice_covolume([[1, 2], [2, 4]])


@settings(max_examples=80, deadline=None)
@given(full_rank(), st.randoms())
def test_covolume_basis_change_invariance(m, rnd):
    # a unimodular change of basis on the right spans the same lattice
    u = random_unimodular(rnd, len(m[0])) if len(m[0]) > 1 else [[rnd.choice([-1, 1])]]
    assert lattice_covolume(matmul(m, u)) == pytest.approx(lattice_covolume(m), rel=1e-12)
    assert is_saturated(matmul(m, u)) == is_saturated(m)


def test_pairing_examples():
    assert [pairing_p2(0, 0), pairing_p2(1, 0), pairing_p2(0, 1), pairing_p2(2, 0)] == [0, 2, 1, 5]
    assert pairing_pn([7]) == 7
    with pytest.raises(ValueError):
        pairing_p2(-1, 0)
    with pytest.raises(ValueError):
        pairing_pn([])
    with pytest.raises(ValueError):
        unpair_pn(3, 0)


def test_pairing_p2_bijects_triangle():
    n = 40
    values = sorted(pairing_p2(x, y) for x in range(n) for y in range(n - x))
    assert values == list(range(n * (n + 1) // 2))


@given(st.integers(0, 10**12))
def test_unpair_p2_inverts(z):
    assert pairing_p2(*unpair_p2(z)) == z


@given(st.lists(st.integers(0, 10**4), min_size=1, max_size=6))
def test_unpair_pn_inverts(values):
    assert unpair_pn(pairing_pn(values), len(values)) == tuple(values)


def test_pairing_pn_injective_on_small_cube():
    seen = {pairing_pn(v) for v in itertools.product(range(8), repeat=3)}
    assert len(seen) == 8**3
