"""Acceptance criteria as runnable checks.

Each ``criterion_*`` returns a :class:`CriterionResult`; ``run_suite`` runs a
named subset.  Tolerances and experiment sizes are fixed here.
"""

from __future__ import annotations

import itertools
import math
import random
import time
from dataclasses import dataclass
from decimal import Decimal, localcontext
from fractions import Fraction

from .config import ExperimentConfig
from .counting import BoxSpec, IntervalSpec
from .montecarlo import (
    convergence_scan,
    covariance_interval,
    diagnose,
    empirical_moment,
    pmfs_agree,
    run_experiment,
    tv_nonincreasing,
)
from .numbertheory import (
    count_reduced_matrices,
    enumerate_reduced_matrices,
    hermite_column_decompose,
    is_reduced_matrix,
    integer_det,
    matmul,
    pairing_p2,
    pairing_pn,
    phi_k,
    phi_k_bruteforce,
    phi_k_enumerate,
    unpair_pn,
    zeta_ratio_check,
)
from .reference import MomentQuery, limiting_joint_moment, poisson_moment, poisson_pmf, stirling2
from .spectrum import CenterSymbol, independence_predicate

SAMPLES = 10_000
SQRT2 = CenterSymbol.irrational("sqrt2")


@dataclass
class CriterionResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.key} {self.title}: {self.detail} ({self.seconds:.1f}s)"


def _timed(key: str, title: str):
    def wrap(fn):
        def run() -> CriterionResult:
            start = time.perf_counter()
            passed, detail = fn()
            return CriterionResult(key, title, bool(passed), detail, time.perf_counter() - start)

        run.key = key
        run.__name__ = fn.__name__
        run.__doc__ = fn.__doc__
        return run

    return wrap


# ---------------------------------------------------------------------------
# 1


def exact_mean_d2(M: int, interval: IntervalSpec, N) -> Fraction:
    """E[X] at d=2 for alpha ~ U[0,1), by exact piecewise integration.

    The count is piecewise constant in alpha with jumps where some
    m*alpha + m_d hits an endpoint; it is evaluated by a direct loop at the
    midpoint of each piece.  Exact rational arithmetic, so the centre must be
    rational.
    """
    xi = interval.xi.value
    lo = xi + interval.tau / N
    hi = xi + (interval.tau + interval.sigma) / N
    cuts = {Fraction(0), Fraction(1)}
    for m in range(1, M + 1):
        for e in (lo, hi):
            for k in range(math.floor(e - m) - 1, math.ceil(e) + 2):
                a = (e - k) / m
                if 0 < a < 1:
                    cuts.add(a)
    cuts = sorted(cuts)
    total = Fraction(0)
    for a, b in zip(cuts, cuts[1:]):
        mid = (a + b) / 2
        c = 0
        for m in range(1, M + 1):
            s = m * mid
            for md in range(math.floor(lo - s) - 1, math.ceil(hi - s) + 2):
                if lo < s + md < hi:
                    c += 1
        total += c * (b - a)
    return total


@_timed("c1", "exact-mean law")
def criterion_1():
    parts, ok = [], True
    # independent oracle: exact integration at d=2, small M
    for M, iv in [(7, IntervalSpec("1/3", 0, 1)), (12, IntervalSpec("2/5", Fraction(-1, 2), 3)),
                  (20, IntervalSpec("0", Fraction(1, 3), Fraction(5, 2)))]:
        exact = exact_mean_d2(M, iv, M)
        ok &= exact == M * iv.sigma / M
    parts.append(f"d=2 integration oracle {'ok' if ok else 'MISMATCH'}")
    for d, M in [(2, 1000), (3, 32), (5, 6), (8, 3)]:
        cfg = ExperimentConfig(d=d, M=M, intervals=(IntervalSpec(SQRT2, 0, 1),), samples=SAMPLES, seed=101)
        est = empirical_moment(run_experiment(cfg), (1,))
        target = cfg.box.expected_scale
        z = abs(est.value - target) / est.std_error
        ok &= z <= 4
        parts.append(f"d={d} N={cfg.box.N} mean={est.value:.4f} ({z:.2f} SE)")
    return ok, "; ".join(parts)


# ---------------------------------------------------------------------------
# 2


def poisson_series(sigma: Fraction, n: int, terms: int = 400) -> Decimal:
    """sum_k k^n e^-sigma sigma^k / k! in 50-digit decimal arithmetic."""
    with localcontext() as ctx:
        ctx.prec = 50
        s = Decimal(sigma.numerator) / Decimal(sigma.denominator)
        total, term = Decimal(0), Decimal(1)  # term = sigma^k / k!
        for k in range(terms):
            if k:
                term = term * s / k
            total += Decimal(k) ** n * term
        return total * (-s).exp()


@_timed("c2", "Poisson moments")
def criterion_2():
    # A polynomial of degree <= n is fixed by its values at n+1 points, so
    # agreement at 0..n+1 is agreement as polynomials.
    closed = {1: lambda s: s, 2: lambda s: s * s + s, 3: lambda s: s**3 + 3 * s * s + s}
    symbolic = all(
        poisson_moment(Fraction(x), n) == f(Fraction(x)) for n, f in closed.items() for x in range(n + 2)
    )
    worst = 0.0
    worst_rel_float = 0.0
    for sigma in (Fraction(1, 2), Fraction(1), Fraction(2), Fraction(4)):
        for n in range(1, 9):
            exact = poisson_moment(sigma, n)
            series = poisson_series(sigma, n)
            gap = abs(series - Decimal(exact.numerator) / Decimal(exact.denominator))
            worst = max(worst, float(gap))
            flt = math.fsum(k**n * poisson_pmf(float(sigma), k) for k in range(400))
            worst_rel_float = max(worst_rel_float, abs(flt - float(exact)) / float(exact))
    ok = symbolic and worst <= 1e-10 and worst_rel_float <= 1e-12
    return ok, (f"closed forms n=1..3 {'match' if symbolic else 'DIFFER'}; "
                f"max |series - formula| = {worst:.2e} (tol 1e-10); "
                f"float pmf series max rel gap {worst_rel_float:.2e}")


# ---------------------------------------------------------------------------
# 3


@_timed("c3", "Poissonization in d")
def criterion_3():
    template = ExperimentConfig(d=2, N=10_000, intervals=(IntervalSpec(SQRT2, 0, 1),),
                                samples=SAMPLES, seed=303)
    rows = convergence_scan(template, "d", [2, 4, 8])
    mono = tv_nonincreasing(rows)
    last = rows[-1].tv <= 0.05
    detail = ", ".join(f"d={r.value} (M={r.M}) TV={r.tv:.4f} [{r.tv_lower:.4f}, {r.tv_upper:.4f}]" for r in rows)
    return mono and last, detail + f"; non-increasing={mono}; TV(d=8)<=0.05: {last}"


# ---------------------------------------------------------------------------
# 4


@_timed("c4", "arithmetic obstruction")
def criterion_4():
    a = IntervalSpec(SQRT2, 0, 1)
    b = IntervalSpec(SQRT2, Fraction(1, 2), Fraction(3, 2))
    limit = limiting_joint_moment(MomentQuery.from_intervals([a, b])) - a.sigma * b.sigma
    same = ExperimentConfig(d=8, M=3, intervals=(a, b), samples=SAMPLES, seed=404)
    cov, se, _, _ = covariance_interval(run_experiment(same), 0, 1)
    b2 = IntervalSpec("irr:sqrt3", b.tau, b.sigma)
    other = ExperimentConfig(d=8, M=3, intervals=(a, b2), samples=SAMPLES, seed=404)
    cov2, _, lo2, hi2 = covariance_interval(run_experiment(other), 0, 1)
    ok = 0.35 <= cov <= 0.65 and lo2 <= 0 <= hi2
    return ok, (f"limit {limit}; same centre cov={cov:.4f}±{se:.4f} (need [0.35, 0.65]); "
                f"distinct centres cov={cov2:.4f}, 95% CI [{lo2:.4f}, {hi2:.4f}]")


# ---------------------------------------------------------------------------
# 5


@_timed("c5", "partition-formula consistency")
def criterion_5():
    ok_moments = True
    for sigma in (Fraction(1), Fraction(1, 2), Fraction(7, 3)):
        for k in range(1, 7):
            q = MomentQuery(tuple((0, (Fraction(0), sigma)) for _ in range(k)))
            expected = sum(stirling2(k, l) * sigma**l for l in range(1, k + 1))
            ok_moments &= limiting_joint_moment(q) == expected
    rng = random.Random(505)
    pool = ["1/2", "1/3", "irr:sqrt2"]
    agree = 0
    independent = 0
    for _ in range(200):
        n = rng.randint(2, 5)
        ivs = [IntervalSpec(rng.choice(pool), Fraction(rng.randint(-4, 4), 2), Fraction(rng.randint(1, 4), 2))
               for _ in range(n)]
        pred = independence_predicate(ivs)
        moment = limiting_joint_moment(MomentQuery.from_intervals(ivs))
        factor = math.prod((iv.sigma for iv in ivs), start=Fraction(1))
        agree += pred == (moment == factor)
        independent += pred
    ok = ok_moments and agree == 200
    return ok, (f"k<=6 identical entries {'match' if ok_moments else 'DIFFER'} Stirling sums; "
                f"predicate/factorization agree {agree}/200 ({independent} independent cases)")


# ---------------------------------------------------------------------------
# 6


def _random_unimodular(rng: random.Random, d: int) -> list[list[int]]:
    u = [[int(i == j) for j in range(d)] for i in range(d)]
    for _ in range(3 * d):
        i, j = rng.sample(range(d), 2)
        q = rng.randint(-3, 3)
        u[i] = [x + q * y for x, y in zip(u[i], u[j])]
    return u


@_timed("c6", "number-theory kernel")
def criterion_6():
    phi_ok = all(
        phi_k(k, n) == (phi_k_bruteforce(k, n) if n ** (k + 1) <= 10**6 else phi_k_enumerate(k, n))
        for k in range(4)
        for n in range(1, 201)
    )
    check = zeta_ratio_check(1, 5, 10**6)
    zeta_ok = abs(check.partial_sum - check.target) <= 1e-6
    rng = random.Random(606)
    done = recon = unique = 0
    while done < 500:
        d = rng.randint(2, 6)
        r = rng.randint(1, min(3, d - 1))
        m = [[rng.randint(-20, 20) for _ in range(r)] for _ in range(d)]
        try:
            f = hermite_column_decompose(m)
        except ValueError:
            continue
        done += 1
        good = (f.reconstruct() == m and integer_det(f.Nmat) == 1 and is_reduced_matrix(f.A))
        recon += good
        g = hermite_column_decompose(matmul(_random_unimodular(rng, d), m))
        unique += (g.t, g.A) == (f.t, f.A)
    count_ok = True
    for r in (1, 2, 3):
        for tail in itertools.product(range(1, 7), repeat=r - 1):
            diag = (1,) + tail
            count_ok &= count_reduced_matrices(diag) == sum(1 for _ in enumerate_reduced_matrices(diag))
    ok = phi_ok and zeta_ok and recon == 500 and unique == 500 and count_ok
    return ok, (f"phi_k vs brute force {phi_ok}; zeta gap {abs(check.partial_sum - check.target):.2e}; "
                f"decompositions reconstructed {recon}/500, canonical A {unique}/500; "
                f"reduced-matrix counts {count_ok}")


# ---------------------------------------------------------------------------
# 7


@_timed("c7", "pairing bijection")
def criterion_7():
    values = [pairing_p2(x, s - x) for s in range(61) for x in range(s + 1)]
    bij = sorted(values) == list(range(math.comb(62, 2)))
    roundtrip = True
    for n in range(1, 5):
        seen = set()
        for t in itertools.product(range(16), repeat=n):
            z = pairing_pn(t)
            seen.add(z)
            roundtrip &= unpair_pn(z, n) == t
        roundtrip &= len(seen) == 16**n
    return bij and roundtrip, f"p2 triangle bijective {bij}; p_n round trip n<=4 {roundtrip}"


# ---------------------------------------------------------------------------
# 8


@_timed("c8", "finite-d stabilization in N")
def criterion_8():
    hists = []
    rows = []
    for N in (1000, 10_000):
        cfg = ExperimentConfig(d=2, N=N, intervals=(IntervalSpec(SQRT2, 0, 1),), samples=SAMPLES, seed=808)
        h = run_experiment(cfg)
        hists.append(h)
        rows.append(diagnose(cfg, h, N))
    bad = pmfs_agree(*hists, seed=808)
    non_poisson = all(r.tv > 0.05 for r in rows)
    detail = (f"cells outside overlapping 95% bootstrap CIs: {len(bad)}; "
              + ", ".join(f"TV(N={r.value})={r.tv:.4f}" for r in rows))
    if not non_poisson:
        detail += " (expected-fail-tolerant: TV <= 0.05 observed)"
    return not bad, detail


# ---------------------------------------------------------------------------
# 9


@_timed("c9", "determinism across workers")
def criterion_9():
    from .records import ResultRecord, simulate

    base = dict(d=3, M=12, intervals=(IntervalSpec(SQRT2, 0, 1), IntervalSpec("1/3", Fraction(1, 2), 2)),
                samples=3000, seed=909)
    texts = [simulate(ExperimentConfig(**base, workers=w)).to_json(include_runtime=False) for w in (1, 4)]
    same = texts[0] == texts[1]
    full = simulate(ExperimentConfig(**base)).to_json()
    roundtrip = ResultRecord.from_json(full).to_json() == full
    return same and roundtrip, f"workers 1 vs 4 identical: {same}; serialize/parse round trip: {roundtrip}"


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]
SUITES = {
    "all": [c.key for c in CRITERIA],
    "quick": ["c2", "c5", "c6", "c7"],
    "montecarlo": ["c1", "c3", "c4", "c8", "c9"],
}


def run_suite(name: str = "all") -> list[CriterionResult]:
    by_key = {c.key: c for c in CRITERIA}
    if name in SUITES:
        keys = SUITES[name]
    elif name in by_key:
        keys = [name]
    else:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES) + sorted(by_key)}")
    return [by_key[k]() for k in keys]
