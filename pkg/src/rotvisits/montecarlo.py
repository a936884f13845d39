"""Monte Carlo estimation of joint visit-count laws.

Every sample index owns its random stream, derived by hashing the master
seed together with the index, so histograms do not depend on how samples are
split across workers.  Samples are processed in fixed-size chunks and the
partial histograms are merged.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

from .config import ExperimentConfig, SamplingLaw
from .counting import BoxSpec, count_batch, prefix_grid
from .reference import ReferencePMF

CHUNK = 1024
BOOTSTRAP_RESAMPLES = 200


@dataclass
class JointHistogram:
    """Tallies of count vectors.  A coordinate equal to cap+1 stands for '> cap'."""

    dims: int
    overflow_cap: int = 64
    cells: dict[tuple[int, ...], int] = field(default_factory=dict)
    samples: int = 0

    def add(self, counts: np.ndarray) -> None:
        counts = np.asarray(counts, dtype=np.int64).reshape(-1, self.dims)
        if counts.size == 0:
            return
        clipped = np.minimum(counts, self.overflow_cap + 1)
        rows, tallies = np.unique(clipped, axis=0, return_counts=True)
        for row, t in zip(rows, tallies):
            key = tuple(int(x) for x in row)
            self.cells[key] = self.cells.get(key, 0) + int(t)
        self.samples += counts.shape[0]

    def merge(self, other: JointHistogram) -> JointHistogram:
        if other.dims != self.dims or other.overflow_cap != self.overflow_cap:
            raise ValueError("cannot merge histograms of different shape")
        for key, t in other.cells.items():
            self.cells[key] = self.cells.get(key, 0) + t
        self.samples += other.samples
        return self

    def arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """(values, tallies) over the sorted nonempty cells."""
        keys = sorted(self.cells)
        values = np.array(keys, dtype=np.float64).reshape(len(keys), self.dims)
        tallies = np.array([self.cells[k] for k in keys], dtype=np.float64)
        return values, tallies

    def pmf(self) -> dict[tuple[int, ...], float]:
        return {k: t / self.samples for k, t in sorted(self.cells.items())}

    def marginal(self, j: int) -> JointHistogram:
        out = JointHistogram(1, self.overflow_cap)
        for key, t in self.cells.items():
            out.cells[(key[j],)] = out.cells.get((key[j],), 0) + t
        out.samples = self.samples
        return out

    def permuted(self, perm: Sequence[int]) -> JointHistogram:
        out = JointHistogram(self.dims, self.overflow_cap, samples=self.samples)
        out.cells = {tuple(k[p] for p in perm): t for k, t in self.cells.items()}
        return out

    def overflowed(self) -> int:
        return sum(t for k, t in self.cells.items() if max(k) > self.overflow_cap)


@dataclass(frozen=True)
class MomentEstimate:
    order: tuple[int, ...]
    value: float
    std_error: float


# ---------------------------------------------------------------------------
# Sampling


def sample_uniforms(seed: int, start: int, stop: int, dim: int) -> np.ndarray:
    """Uniform [0, 1) variates for sample indices start..stop-1, one row each.

    Row i is a hash of (seed, i) through SeedSequence, so any row can be
    regenerated on its own.
    """
    out = np.empty((stop - start, dim), dtype=np.uint64)
    for row, i in enumerate(range(start, stop)):
        out[row] = np.random.SeedSequence(seed, spawn_key=(i,)).generate_state(dim, np.uint64)
    return (out >> np.uint64(11)).astype(np.float64) * 2.0**-53


def sample_alphas(seed: int, start: int, stop: int, d: int, law: SamplingLaw) -> np.ndarray:
    return law.transform(sample_uniforms(seed, start, stop, d - 1))


@lru_cache(maxsize=4)
def _grid(box: BoxSpec) -> np.ndarray:
    return prefix_grid(box)


def _run_chunk(config: ExperimentConfig, start: int, stop: int) -> JointHistogram:
    box = config.box
    alphas = sample_alphas(config.seed, start, stop, config.d, config.law)
    hist = JointHistogram(len(config.intervals), config.overflow_cap)
    hist.add(count_batch(alphas, box, config.intervals, grid=_grid(box)))
    return hist


def run_experiment(config: ExperimentConfig) -> JointHistogram:
    """Draw ``config.samples`` rotation vectors and tally their joint counts."""
    config.validate()
    hist = JointHistogram(len(config.intervals), config.overflow_cap)
    bounds = [(s, min(s + CHUNK, config.samples)) for s in range(0, config.samples, CHUNK)]
    if config.workers == 1 or len(bounds) <= 1:
        parts = (_run_chunk(config, a, b) for a, b in bounds)
        for part in parts:
            hist.merge(part)
        return hist
    with ProcessPoolExecutor(max_workers=config.workers) as pool:
        for part in pool.map(_run_chunk, [config] * len(bounds), *zip(*bounds)):
            hist.merge(part)
    return hist


# ---------------------------------------------------------------------------
# Estimators


def _require(hist: JointHistogram, minimum: int = 2):
    if hist.samples == 0:
        raise ValueError("empty histogram")
    if hist.samples < minimum:
        raise ValueError(f"need at least {minimum} samples, got {hist.samples}")


def empirical_moment(hist: JointHistogram, order: Sequence[int]) -> MomentEstimate:
    """Plug-in mixed moment mean(prod_j X_j^k_j) with its jackknife standard error.

    For a sample mean the jackknife standard error is exactly s/sqrt(n), so it
    is computed from the histogram without per-sample data.
    """
    order = tuple(int(k) for k in order)
    if len(order) != hist.dims:
        raise ValueError(f"order has {len(order)} entries for {hist.dims} components")
    if not any(order) or min(order) < 0:
        raise ValueError("moment order must be nonnegative and not all zero")
    _require(hist)
    values, tallies = hist.arrays()
    z = np.prod(values ** np.array(order, dtype=np.float64), axis=1)
    n = hist.samples
    mean = float(np.dot(tallies, z) / n)
    var = float(np.dot(tallies, (z - mean) ** 2) / (n - 1))
    return MomentEstimate(order, mean, math.sqrt(var / n))


def _cov_from_sums(n, sx, sy, sxy):
    return sxy / n - (sx / n) * (sy / n)


def empirical_covariance(hist: JointHistogram, j: int, k: int) -> float:
    """Plug-in covariance (divisor n) of components j and k."""
    _require(hist)
    values, tallies = hist.arrays()
    x, y = values[:, j], values[:, k]
    n = hist.samples
    return float(_cov_from_sums(n, tallies @ x, tallies @ y, tallies @ (x * y)))


def covariance_interval(hist: JointHistogram, j: int, k: int, z: float = 1.959963984540054):
    """(covariance, jackknife SE, lower, upper) at the normal quantile z.

    Leave-one-out estimates are identical within a cell, so the jackknife
    runs over cells weighted by their tallies.
    """
    _require(hist, 3)
    values, tallies = hist.arrays()
    x, y = values[:, j], values[:, k]
    n = hist.samples
    sx, sy, sxy = tallies @ x, tallies @ y, tallies @ (x * y)
    cov = float(_cov_from_sums(n, sx, sy, sxy))
    loo = _cov_from_sums(n - 1, sx - x, sy - y, sxy - x * y)
    center = float(tallies @ loo / n)
    se = math.sqrt((n - 1) / n * float(tallies @ (loo - center) ** 2))
    return cov, se, cov - z * se, cov + z * se


def total_variation(hist: JointHistogram, ref: ReferencePMF) -> float:
    """Half the L1 distance between the empirical pmf and a reference law.

    Cells above the overflow cap are compared against the pooled reference
    tail mass; reference mass outside the observed cells counts in full.
    """
    if ref.dims != hist.dims:
        raise ValueError(f"reference has {ref.dims} components, histogram {hist.dims}")
    _require(hist, 1)
    observed = 0.0
    covered = 0.0
    for key, t in hist.cells.items():
        p = ref.pooled(key, hist.overflow_cap)
        observed += abs(t / hist.samples - p)
        covered += p
    return min(1.0, max(0.0, 0.5 * (observed + max(0.0, 1.0 - covered))))


def _resample(hist: JointHistogram, rng: np.random.Generator, resamples: int):
    keys = sorted(hist.cells)
    p = np.array([hist.cells[k] for k in keys], dtype=np.float64) / hist.samples
    return keys, rng.multinomial(hist.samples, p, size=resamples)


def tv_bootstrap(
    hist: JointHistogram, ref: ReferencePMF, seed: int = 0, resamples: int = BOOTSTRAP_RESAMPLES,
    level: float = 0.95,
) -> tuple[float, float, float]:
    """(TV, lower, upper): percentile bootstrap band from multinomial resampling."""
    tv = total_variation(hist, ref)
    keys, draws = _resample(hist, np.random.default_rng(seed), resamples)
    tvs = []
    for row in draws:
        boot = JointHistogram(hist.dims, hist.overflow_cap, samples=hist.samples)
        boot.cells = {k: int(c) for k, c in zip(keys, row) if c}
        tvs.append(total_variation(boot, ref))
    lo, hi = np.quantile(tvs, [(1 - level) / 2, (1 + level) / 2])
    return tv, float(lo), float(hi)


def pmf_bootstrap(
    hist: JointHistogram, seed: int = 0, resamples: int = BOOTSTRAP_RESAMPLES, level: float = 0.95
) -> dict[tuple[int, ...], tuple[float, float, float]]:
    """Per-cell (estimate, lower, upper) percentile bootstrap intervals."""
    _require(hist, 1)
    keys, draws = _resample(hist, np.random.default_rng(seed), resamples)
    lo, hi = np.quantile(draws / hist.samples, [(1 - level) / 2, (1 + level) / 2], axis=0)
    return {k: (hist.cells[k] / hist.samples, float(a), float(b)) for k, a, b in zip(keys, lo, hi)}


def pmfs_agree(a: JointHistogram, b: JointHistogram, seed: int = 0) -> list[tuple]:
    """Cells where the two bootstrap intervals fail to overlap (empty list = agreement).

    A cell seen in only one histogram gets the interval [0, 0] on the other side.
    """
    ca, cb = pmf_bootstrap(a, seed), pmf_bootstrap(b, seed + 1)
    bad = []
    for key in sorted(set(ca) | set(cb)):
        ea, la, ha = ca.get(key, (0.0, 0.0, 0.0))
        eb, lb, hb = cb.get(key, (0.0, 0.0, 0.0))
        if ha < lb or hb < la:
            bad.append((key, ea, eb))
    return bad


# ---------------------------------------------------------------------------
# Scans


@dataclass
class ScanRow:
    value: float
    M: int
    N: float
    samples: int
    tv: float
    tv_lower: float
    tv_upper: float
    means: list[MomentEstimate]
    second_moments: list[MomentEstimate]
    covariances: dict[tuple[int, int], float]
    histogram: JointHistogram = field(repr=False)

    @property
    def tv_halfwidth(self) -> float:
        return (self.tv_upper - self.tv_lower) / 2


def diagnose(config: ExperimentConfig, hist: JointHistogram, value=None) -> ScanRow:
    """TV against the product of Poisson(sigma_j) laws plus low-order moments."""
    box = config.box
    n = hist.dims
    ref = ReferencePMF.product_poisson([iv.sigma for iv in config.intervals])
    if hist.samples >= 2:
        tv, lo, hi = tv_bootstrap(hist, ref, seed=config.seed)
        means = [empirical_moment(hist, _unit(n, j)) for j in range(n)]
        seconds = [empirical_moment(hist, _unit(n, j, 2)) for j in range(n)]
        covs = {(j, k): empirical_covariance(hist, j, k) for j in range(n) for k in range(j + 1, n)}
    else:
        tv = lo = hi = float("nan")
        means, seconds, covs = [], [], {}
    return ScanRow(
        value=value, M=box.M, N=box.N, samples=hist.samples, tv=tv, tv_lower=lo, tv_upper=hi,
        means=means, second_moments=seconds, covariances=covs, histogram=hist,
    )


def _unit(n: int, j: int, k: int = 1) -> tuple[int, ...]:
    return tuple(k if i == j else 0 for i in range(n))


def convergence_scan(template: ExperimentConfig, axis: str, grid: Sequence) -> list[ScanRow]:
    """Run the template at each grid value of N or d, all with the template seed."""
    grid = list(grid)
    if not grid:
        raise ValueError("scan grid is empty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("scan grid must be increasing")
    rows = []
    for value in grid:
        cfg = template.with_axis(axis, value)
        rows.append(diagnose(cfg, run_experiment(cfg), value))
    return rows


def tv_nonincreasing(rows: Sequence[ScanRow]) -> bool:
    """Each TV is at most the previous one plus the sum of both bootstrap half-widths."""
    return all(
        b.tv <= a.tv + a.tv_halfwidth + b.tv_halfwidth for a, b in zip(rows, rows[1:])
    )
