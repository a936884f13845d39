"""Reference laws: Poisson pmfs and moments, and the large-d limiting moments.

In the d -> infinity limit the mixed moment E[prod_j Y^j] of visit counts
(one factor per entry, repeated entries for higher orders) is a sum over set
partitions of the entries.  A block may only join entries sharing the same
center, and it contributes the length of the common intersection of its
target intervals.  Exact rational arithmetic throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Hashable, Iterator, Sequence

from .spectrum import group_centers

MAX_QUERY_ENTRIES = 12


def poisson_pmf(sigma: float, k: int) -> float:
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    if k < 0:
        return 0.0
    return math.exp(-sigma + k * math.log(sigma) - math.lgamma(k + 1))


def poisson_tail(sigma: float, cap: int) -> float:
    """P(X > cap) for X ~ Pois(sigma), summed upward to avoid cancellation."""
    if cap < 0:
        return 1.0
    if cap < sigma + 20 * math.sqrt(sigma) + 20:
        return max(0.0, 1.0 - sum(poisson_pmf(sigma, k) for k in range(cap + 1)))
    total, k = 0.0, cap + 1
    term = poisson_pmf(sigma, k)
    while term > 0 and term > total * 1e-17:
        total += term
        k += 1
        term *= sigma / k
    return total


@lru_cache(maxsize=None)
def stirling2(n: int, k: int) -> int:
    """Number of partitions of an n-set into k nonempty blocks."""
    if n < 0 or k < 0:
        raise ValueError("stirling2 takes nonnegative arguments")
    if n == k:
        return 1
    if n == 0 or k == 0 or k > n:
        return 0
    return k * stirling2(n - 1, k) + stirling2(n - 1, k - 1)


def poisson_moment(sigma, n: int):
    """E[X^n] for X ~ Pois(sigma), as sum_k S(n, k) sigma^k.

    Exact when sigma is a Fraction or int.
    """
    if n < 1:
        raise ValueError(f"moment order must be >= 1, got {n}")
    return sum(stirling2(n, k) * sigma**k for k in range(1, n + 1))


def product_poisson_pmf(sigmas: Sequence[float], counts: Sequence[int]) -> float:
    if len(sigmas) != len(counts):
        raise ValueError(f"got {len(sigmas)} parameters for {len(counts)} counts")
    return math.prod(poisson_pmf(s, k) for s, k in zip(sigmas, counts))


def set_partitions(n: int) -> Iterator[list[list[int]]]:
    """All partitions of range(n), generated from restricted-growth strings."""
    if n == 0:
        yield []
        return
    rgs = [0] * n
    while True:
        blocks: list[list[int]] = [[] for _ in range(max(rgs) + 1)]
        for i, b in enumerate(rgs):
            blocks[b].append(i)
        yield blocks
        i = n - 1
        while i > 0 and rgs[i] == max(rgs[:i]) + 1:
            i -= 1
        if i == 0:
            return
        rgs[i] += 1
        for j in range(i + 1, n):
            rgs[j] = 0


@dataclass(frozen=True)
class MomentQuery:
    """One entry per unit moment factor: (group id, open interval (tau, tau + sigma))."""

    entries: tuple[tuple[Hashable, tuple[Fraction, Fraction]], ...]

    def __post_init__(self):
        cleaned = []
        for group, (lo, hi) in self.entries:
            lo, hi = Fraction(lo), Fraction(hi)
            if hi <= lo:
                raise ValueError(f"interval ({lo}, {hi}) has nonpositive length")
            cleaned.append((group, (lo, hi)))
        object.__setattr__(self, "entries", tuple(cleaned))

    @classmethod
    def from_intervals(cls, intervals, order: Sequence[int] | None = None) -> MomentQuery:
        """Expand an order-(k^1, ..., k^n) moment into duplicated unit entries."""
        intervals = list(intervals)
        if order is None:
            order = [1] * len(intervals)
        if len(order) != len(intervals):
            raise ValueError("order and interval lists differ in length")
        gid = {}
        for g, idx in enumerate(group_centers([iv.xi for iv in intervals])):
            for i in idx:
                gid[i] = g
        entries = []
        for i, (iv, k) in enumerate(zip(intervals, order)):
            if k < 0:
                raise ValueError("moment orders must be nonnegative")
            entries.extend([(gid[i], iv.bounds)] * k)
        return cls(tuple(entries))


def _intersection_length(bounds) -> Fraction:
    lo = max(b[0] for b in bounds)
    hi = min(b[1] for b in bounds)
    return max(hi - lo, Fraction(0))


def _group_moment(intervals: list[tuple[Fraction, Fraction]]) -> Fraction:
    # Recursive partition sum; a block with empty intersection kills the term,
    # so such branches are pruned.
    total = Fraction(0)

    def extend(i: int, blocks: list[tuple[Fraction, Fraction]]):
        nonlocal total
        if i == len(intervals):
            total += math.prod((hi - lo for lo, hi in blocks), start=Fraction(1))
            return
        lo, hi = intervals[i]
        for b, (blo, bhi) in enumerate(blocks):
            nlo, nhi = max(lo, blo), min(hi, bhi)
            if nlo < nhi:
                blocks[b] = (nlo, nhi)
                extend(i + 1, blocks)
                blocks[b] = (blo, bhi)
        blocks.append((lo, hi))
        extend(i + 1, blocks)
        blocks.pop()

    extend(0, [])
    return total


def limiting_joint_moment(query: MomentQuery) -> Fraction:
    """Mixed moment of the d -> infinity limit law, exact.

    Partitions whose blocks straddle two centers do not contribute, so the
    sum factorizes over center groups; each group is summed with pruning.
    """
    if not query.entries:
        raise ValueError("empty moment query")
    if len(query.entries) > MAX_QUERY_ENTRIES:
        raise ValueError(f"moment queries are capped at {MAX_QUERY_ENTRIES} entries")
    by_group: dict[Hashable, list] = {}
    for group, bounds in query.entries:
        by_group.setdefault(group, []).append(bounds)
    return math.prod((_group_moment(v) for v in by_group.values()), start=Fraction(1))


def limiting_joint_moment_naive(query: MomentQuery) -> Fraction:
    """Literal sum over every set partition of the entries; slow cross-check."""
    total = Fraction(0)
    entries = query.entries
    for blocks in set_partitions(len(entries)):
        if any(len({entries[i][0] for i in blk}) > 1 for blk in blocks):
            continue
        total += math.prod(
            (_intersection_length([entries[i][1] for i in blk]) for blk in blocks),
            start=Fraction(1),
        )
    return total


@dataclass
class ReferencePMF:
    """Joint pmf on Z_{>=0}^n.

    ``marginals`` is set for product laws and lets overflow cells
    (coordinates above a cap) be evaluated exactly as tail masses.
    """

    dims: int
    evaluator: Callable[[tuple[int, ...]], float]
    description: str
    marginals: list[Callable[[int], float]] | None = None
    tails: list[Callable[[int], float]] | None = field(default=None, repr=False)

    def __call__(self, cell: Sequence[int]) -> float:
        return self.evaluator(tuple(cell))

    def pooled(self, cell: Sequence[int], cap: int) -> float:
        """Probability of a histogram cell where a coordinate cap+1 means '> cap'."""
        if not any(c > cap for c in cell):
            return self(cell)
        if self.tails is None:
            raise ValueError("overflow cells need a product reference with tail masses")
        return math.prod(
            t(cap) if c > cap else m(c) for c, m, t in zip(cell, self.marginals, self.tails)
        )

    @classmethod
    def product_poisson(cls, sigmas: Sequence[float]) -> ReferencePMF:
        sigmas = [float(s) for s in sigmas]
        return cls(
            dims=len(sigmas),
            evaluator=lambda cell: product_poisson_pmf(sigmas, cell),
            description="product of Poisson laws with parameters "
            + ", ".join(f"{s:g}" for s in sigmas),
            marginals=[_bind_pmf(s) for s in sigmas],
            tails=[_bind_tail(s) for s in sigmas],
        )


def _bind_pmf(s: float) -> Callable[[int], float]:
    return lambda k: poisson_pmf(s, k)


def _bind_tail(s: float) -> Callable[[int], float]:
    return lambda cap: poisson_tail(s, cap)
