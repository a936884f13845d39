"""Arithmetic behind the moment formula.

Jordan-type totients phi_k, the Dirichlet-series identity
sum phi_k(n)/n^d = zeta(d-k)/zeta(d), the unimodular column decomposition
m = N A used to parametrize independent integer vectors, covolumes of
integer lattices, and polynomial pairing bijections N_0^n -> N_0.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd, isqrt
from typing import NamedTuple, Sequence

import numpy as np

# ---------------------------------------------------------------------------
# Totients


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division."""
    if n < 1:
        raise ValueError(f"cannot factor {n}")
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def phi_k(k: int, n: int) -> int:
    """Number of k-tuples in {0..n-1}^k with gcd(n, n_1, ..., n_k) = 1.

    Multiplicative with phi_k(p^e) = p^(ek) (1 - p^-k); phi_0 is identically 1
    and phi_1 is Euler's totient.
    """
    if n < 1:
        raise ValueError(f"phi_k needs n >= 1, got {n}")
    if k < 0:
        raise ValueError(f"phi_k needs k >= 0, got {k}")
    if k == 0:
        return 1
    out = 1
    for p, e in factorize(n).items():
        out *= p ** (e * k) - p ** ((e - 1) * k)
    return out


def phi_k_bruteforce(k: int, n: int) -> int:
    if n < 1:
        raise ValueError(f"phi_k needs n >= 1, got {n}")
    if n * n**k > 10**8:
        raise ValueError(f"enumeration of {n}^{k} tuples is too large")
    if k == 0:
        return 1  # empty-tuple convention, matching phi_0 = 1
    return sum(1 for t in itertools.product(range(n), repeat=k) if gcd(n, *t) == 1)


def phi_k_enumerate(k: int, n: int) -> int:
    """Tuple count by folding in one coordinate at a time.

    Tracks how many partial tuples reach each running value of
    gcd(n, n_1, ..., n_i); same count as full enumeration in O(k n tau(n)).
    """
    if n < 1:
        raise ValueError(f"phi_k needs n >= 1, got {n}")
    if k == 0:
        return 1
    states = {n: 1}
    for _ in range(k):
        nxt: dict[int, int] = {}
        for g, c in states.items():
            for x in range(n):
                h = gcd(g, x)
                nxt[h] = nxt.get(h, 0) + c
        states = nxt
    return states.get(1, 0)


def phi_k_ratio_sieve(k: int, cutoff: int) -> np.ndarray:
    """phi_k(n)/n^k for n = 0..cutoff as floats (entry 0 unused)."""
    ratio = np.ones(cutoff + 1)
    if k == 0 or cutoff < 2:
        return ratio
    composite = np.zeros(cutoff + 1, dtype=bool)
    for p in range(2, isqrt(cutoff) + 1):
        if not composite[p]:
            composite[p * p :: p] = True
    for p in np.flatnonzero(~composite[2:]) + 2:
        ratio[p::p] *= 1.0 - float(p) ** -k
    return ratio


# ---------------------------------------------------------------------------
# Zeta

# B_2, B_4, ..., B_14
_BERNOULLI = [
    Fraction(1, 6),
    Fraction(-1, 30),
    Fraction(1, 42),
    Fraction(-1, 30),
    Fraction(5, 66),
    Fraction(-691, 2730),
    Fraction(7, 6),
]


def zeta(s: float, terms: int = 20) -> float:
    """Riemann zeta for real s > 1 by Euler-Maclaurin summation.

    With 20 direct terms and seven correction terms the error is far below
    1e-12 for every s >= 2.
    """
    if not s > 1:
        raise ValueError(f"zeta needs s > 1, got {s}")
    n = terms
    head = math.fsum(j ** -s for j in range(1, n))
    tail = n ** (1 - s) / (s - 1) + 0.5 * n**-s
    rising = s  # s (s+1) ... (s+2k-2)
    for k, b in enumerate(_BERNOULLI, start=1):
        tail += float(b) / math.factorial(2 * k) * rising * n ** (-s - 2 * k + 1)
        rising *= (s + 2 * k - 1) * (s + 2 * k)
    return head + tail


class ZetaRatioCheck(NamedTuple):
    partial_sum: float
    target: float
    gap_bound: float

    @property
    def ok(self) -> bool:
        return abs(self.partial_sum - self.target) <= self.gap_bound


def zeta_ratio_check(k: int, d: int, cutoff: int) -> ZetaRatioCheck:
    """Compare sum_{n <= cutoff} phi_k(n)/n^d with zeta(d-k)/zeta(d).

    The gap bound combines the tail sum_{n > cutoff} n^(k-d), which dominates
    the omitted terms since phi_k(n) <= n^k, with floating-point slack.
    With phi_0 identically 1 the k = 0 sum is zeta(d) itself, so that case
    reports the partial sum divided by zeta(d) against the target 1.
    Raises ArithmeticError if the gap exceeds the bound.
    """
    if d - k < 2:
        raise ValueError(f"need d - k >= 2, got d={d}, k={k}")
    if cutoff < 1:
        raise ValueError("cutoff must be positive")
    n = np.arange(cutoff + 1, dtype=np.float64)
    n[0] = 1.0
    terms = phi_k_ratio_sieve(k, cutoff) * n ** float(k - d)
    partial = float(math.fsum(terms[1:]))
    target = zeta(d - k) / zeta(d)
    tail = cutoff ** float(k - d + 1) / (d - k - 1)
    if k == 0:
        partial /= zeta(d)
        tail /= zeta(d)
    slack = 1e-12 + 4 * float(np.finfo(float).eps) * (math.log2(cutoff) + 1) * target
    check = ZetaRatioCheck(partial, target, tail + slack)
    if not check.ok:
        raise ArithmeticError(
            f"sum phi_{k}(n)/n^{d} = {partial!r} misses {target!r} by more than {check.gap_bound:g}"
        )
    return check


# ---------------------------------------------------------------------------
# Integer matrices


def _rows(m) -> list[list[int]]:
    rows = [[int(x) for x in row] for row in (m.tolist() if hasattr(m, "tolist") else m)]
    if not rows or len({len(r) for r in rows}) != 1:
        raise ValueError("matrix must be a nonempty list of equal-length rows")
    return rows


def _columns(rows: list[list[int]]) -> list[list[int]]:
    return [list(c) for c in zip(*rows)]


def integer_det(m) -> int:
    """Determinant of a square integer matrix (fraction-free Bareiss)."""
    a = _rows(m)
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("determinant needs a square matrix")
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def matmul(a, b) -> list[list[int]]:
    a, b = _rows(a), _rows(b)
    cols = _columns(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def _gram(columns: list[list[int]]) -> list[list[int]]:
    return [[sum(x * y for x, y in zip(u, v)) for v in columns] for u in columns]


@dataclass(frozen=True)
class HermiteFactor:
    """Decomposition of a d x r integer matrix with independent columns.

    Column j of the input equals ``t[j]`` times column j of ``Nmat @ A``
    where A (r x r) is padded with d - r zero rows.  A is upper triangular,
    each column's entries on and above the diagonal are coprime, and entries
    above the diagonal lie in [0, a_jj).  ``Nmat`` has determinant +1.
    """

    t: tuple[int, ...]
    A: tuple[tuple[int, ...], ...]
    Nmat: tuple[tuple[int, ...], ...]

    def padded_A(self) -> list[list[int]]:
        r = len(self.A)
        d = len(self.Nmat)
        return [list(row) for row in self.A] + [[0] * r for _ in range(d - r)]

    def reconstruct(self) -> list[list[int]]:
        prod = matmul(self.Nmat, self.padded_A())
        return [[x * t for x, t in zip(row, self.t)] for row in prod]


def hermite_column_decompose(m) -> HermiteFactor:
    """Write the primitive parts of the columns of m as N A with N in SL(d, Z).

    Row operations bring the primitive column matrix to Hermite form H = U P;
    the inverse of U is tracked alongside as column operations, and a sign
    flip on a zero row of H fixes det N = +1 (possible since r < d).
    """
    rows = _rows(m)
    d, r = len(rows), len(rows[0])
    if r >= d:
        raise ValueError(f"need fewer columns than rows, got {d}x{r}")
    cols = _columns(rows)
    t = tuple(gcd(*c) for c in cols)
    if 0 in t:
        raise ValueError("rank-deficient input: zero column")
    H = [[cols[j][i] // t[j] for j in range(r)] for i in range(d)]
    N = [[int(i == j) for j in range(d)] for i in range(d)]
    det_u = 1

    def swap(a, b):
        nonlocal det_u
        if a == b:
            return
        H[a], H[b] = H[b], H[a]
        for row in N:
            row[a], row[b] = row[b], row[a]
        det_u = -det_u

    def negate(a):
        nonlocal det_u
        H[a] = [-x for x in H[a]]
        for row in N:
            row[a] = -row[a]
        det_u = -det_u

    def add(a, b, q):
        # row_a += q * row_b in H; the inverse acts as col_b -= q * col_a on N
        if q == 0:
            return
        H[a] = [x + q * y for x, y in zip(H[a], H[b])]
        for row in N:
            row[b] -= q * row[a]

    for j in range(r):
        while True:
            live = [i for i in range(j, d) if H[i][j] != 0]
            if not live:
                raise ValueError("rank-deficient input: columns are linearly dependent")
            piv = min(live, key=lambda i: abs(H[i][j]))
            swap(j, piv)
            done = True
            for i in range(j + 1, d):
                if H[i][j]:
                    add(i, j, -(H[i][j] // H[j][j]))
                    done = done and H[i][j] == 0
            if done:
                break
        if H[j][j] < 0:
            negate(j)
    for j in range(r):
        for i in range(j):
            add(i, j, -(H[i][j] // H[j][j]))
    if det_u < 0:
        negate(d - 1)
    A = tuple(tuple(H[i][:r]) for i in range(r))
    return HermiteFactor(t, A, tuple(tuple(row) for row in N))


def is_reduced_matrix(A: Sequence[Sequence[int]]) -> bool:
    """The canonical-form conditions on A."""
    r = len(A)
    for j in range(r):
        if A[j][j] <= 0:
            return False
        if any(A[i][j] != 0 for i in range(j + 1, r)):
            return False
        if any(not 0 <= A[i][j] < A[j][j] for i in range(j)):
            return False
        if gcd(*(A[i][j] for i in range(j + 1))) != 1:
            return False
    return True


def count_reduced_matrices(diag: Sequence[int]) -> int:
    """Number of reduced A with the given diagonal: prod_j phi_{j-1}(a_jj)."""
    if not diag or diag[0] != 1:
        raise ValueError("the first diagonal entry of a reduced matrix is 1")
    return math.prod(phi_k(j, a) for j, a in enumerate(diag))


def enumerate_reduced_matrices(diag: Sequence[int]):
    """Yield every reduced upper-triangular A with the given diagonal."""
    r = len(diag)
    choices = []
    for j, a in enumerate(diag):
        choices.append([c for c in itertools.product(range(a), repeat=j) if gcd(a, *c) == 1])
    for picks in itertools.product(*choices):
        A = [[0] * r for _ in range(r)]
        for j, col in enumerate(picks):
            for i, x in enumerate(col):
                A[i][j] = x
            A[j][j] = diag[j]
        yield tuple(tuple(row) for row in A)


def lattice_covolume(basis) -> float:
    """Volume of a fundamental domain of the lattice spanned by the columns."""
    cols = _columns(_rows(basis))
    g = integer_det(_gram(cols))
    if g <= 0:
        raise ValueError("rank-deficient basis")
    return math.sqrt(g)


def is_saturated(basis) -> bool:
    """Whether the integer span of the columns is all integer points of their real span."""
    rows = _rows(basis)
    r = len(rows[0])
    minors = [integer_det([rows[i] for i in idx]) for idx in itertools.combinations(range(len(rows)), r)]
    g = gcd(*minors)
    if g == 0:
        raise ValueError("rank-deficient basis")
    return g == 1


# ---------------------------------------------------------------------------
# Pairing


def pairing_p2(x: int, y: int) -> int:
    """Bijection N_0 x N_0 -> N_0, (x, y) -> C(x+y+2, 2) - (y+1)."""
    if x < 0 or y < 0:
        raise ValueError("pairing takes nonnegative integers")
    return comb(x + y + 2, 2) - (y + 1)


def unpair_p2(z: int) -> tuple[int, int]:
    if z < 0:
        raise ValueError("pairing takes nonnegative integers")
    # diagonal s = x + y holds the values C(s+1, 2) .. C(s+2, 2) - 1
    s = (isqrt(8 * z + 1) - 1) // 2
    while comb(s + 1, 2) > z:
        s -= 1
    while comb(s + 2, 2) <= z:
        s += 1
    y = comb(s + 2, 2) - 1 - z
    return s - y, y


def pairing_pn(values: Sequence[int]) -> int:
    """Left fold of pairing_p2; the 1-tuple maps to itself."""
    if not values:
        raise ValueError("pairing needs at least one value")
    z = values[0]
    if z < 0:
        raise ValueError("pairing takes nonnegative integers")
    for v in values[1:]:
        z = pairing_p2(z, v)
    return z


def unpair_pn(z: int, n: int) -> tuple[int, ...]:
    if n < 1:
        raise ValueError("tuple length must be >= 1")
    out = []
    for _ in range(n - 1):
        z, v = unpair_p2(z)
        out.append(v)
    out.append(z)
    return tuple(reversed(out))
