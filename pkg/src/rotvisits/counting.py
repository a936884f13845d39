"""Exact finite-N visit counts.

For a rotation vector ``alpha`` of length d-1 the statistic counts lattice
points ``(m_1, ..., m_d)`` with ``1 <= m_i <= M`` for i < d and ``m_d`` any
integer such that ``sum(m_i * alpha_i) + m_d`` falls in the open interval
``(xi + tau/N, xi + (tau + sigma)/N)``.  Summing over ``m_d`` turns each
prefix into "how many integers lie strictly inside a real interval", so the
work is one pass over the ``M**(d-1)`` prefixes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .spectrum import CenterSymbol

# Smallest admissible target width sigma/N; prefix sums carry ~d*M*eps error.
MIN_WIDTH = 1e-9

# Upper bound on the (samples x prefixes) block materialised at once.
_BLOCK_CELLS = 1 << 21


def _as_fraction(x) -> Fraction:
    if isinstance(x, float):
        return Fraction(str(x))
    return Fraction(x)


@dataclass(frozen=True)
class BoxSpec:
    """Truncation box: prefixes run over {1..M}^(d-1), scale parameter N."""

    d: int
    M: int
    N: float

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if self.M < 1:
            raise ValueError(f"M must be >= 1, got {self.M}")
        if not self.N > 0:
            raise ValueError(f"N must be positive, got {self.N}")

    @classmethod
    def from_N(cls, d: int, N) -> BoxSpec:
        if d < 2:
            raise ValueError(f"d must be >= 2, got {d}")
        if not N > 0:
            raise ValueError(f"N must be positive, got {N}")
        return cls(d, integer_root(N, d - 1), N)

    @classmethod
    def from_M(cls, d: int, M: int) -> BoxSpec:
        return cls(d, M, M ** (d - 1))

    @property
    def prefixes(self) -> int:
        return self.M ** (self.d - 1)

    @property
    def expected_scale(self) -> float:
        """M^(d-1)/N; the exact mean of a count is this times sigma."""
        return self.prefixes / self.N


def integer_root(N, k: int) -> int:
    """floor(N ** (1/k)) for positive real N, exact for integer N."""
    m = max(int(round(float(N) ** (1.0 / k))), 0)
    while (m + 1) ** k <= N:
        m += 1
    while m > 0 and m**k > N:
        m -= 1
    return m


@dataclass(frozen=True)
class IntervalSpec:
    """Target (xi + tau/N, xi + (tau + sigma)/N) on R/Z."""

    xi: CenterSymbol
    tau: Fraction
    sigma: Fraction

    def __post_init__(self):
        object.__setattr__(self, "xi", CenterSymbol.parse(self.xi))
        object.__setattr__(self, "tau", _as_fraction(self.tau))
        object.__setattr__(self, "sigma", _as_fraction(self.sigma))
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")

    @property
    def bounds(self) -> tuple[Fraction, Fraction]:
        return self.tau, self.tau + self.sigma

    def endpoints(self, N) -> tuple[float, float]:
        """Real endpoints at scale N, shifted into [0, 1) on the left."""
        x = float(self.xi)
        lo = x + float(self.tau) / N
        hi = x + float(self.tau + self.sigma) / N
        shift = math.floor(lo)
        return lo - shift, hi - shift


def check_precision(box: BoxSpec, interval: IntervalSpec) -> None:
    if float(interval.sigma) / box.N < MIN_WIDTH:
        raise ValueError(
            f"target width sigma/N = {float(interval.sigma) / box.N:.3g} is below "
            f"the double-precision guard {MIN_WIDTH:g}"
        )


def prefix_grid(box: BoxSpec) -> np.ndarray:
    """All prefixes (m_1, ..., m_{d-1}) as a (M^(d-1), d-1) float array."""
    axis = np.arange(1, box.M + 1, dtype=np.float64)
    if box.d == 2:
        return axis[:, None]
    mesh = np.meshgrid(*([axis] * (box.d - 1)), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def _fractional_sums(alphas: np.ndarray, grid: np.ndarray) -> np.ndarray:
    # Fixed accumulation order keeps results independent of BLAS threading.
    s = alphas[:, 0, None] * grid[None, :, 0]
    for i in range(1, grid.shape[1]):
        s += alphas[:, i, None] * grid[None, :, i]
    s -= np.floor(s)
    return s


def _integers_strictly_inside(lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    # Open interval: ceil(hi) - floor(lo) - 1 is exact, also at integer endpoints.
    return (np.ceil(hi) - np.floor(lo) - 1.0).astype(np.int64)


def _validate(alphas: np.ndarray, box: BoxSpec, intervals: Sequence[IntervalSpec]):
    if alphas.ndim != 2 or alphas.shape[1] != box.d - 1:
        raise ValueError(
            f"alpha must have length d-1 = {box.d - 1}, got shape {alphas.shape[1:]}"
        )
    if not intervals:
        raise ValueError("at least one interval is required")
    for iv in intervals:
        check_precision(box, iv)


def count_batch(
    alphas, box: BoxSpec, intervals: Sequence[IntervalSpec], grid: np.ndarray | None = None
) -> np.ndarray:
    """Visit counts for a batch of rotation vectors.

    Parameters
    ----------
    alphas : array of shape (B, d-1)
    box : BoxSpec
    intervals : sequence of IntervalSpec (n targets)
    grid : optional precomputed ``prefix_grid(box)``

    Returns
    -------
    (B, n) int64 array of counts.
    """
    alphas = np.atleast_2d(np.asarray(alphas, dtype=np.float64))
    _validate(alphas, box, intervals)
    if grid is None:
        grid = prefix_grid(box)
    ends = [iv.endpoints(box.N) for iv in intervals]
    out = np.zeros((alphas.shape[0], len(intervals)), dtype=np.int64)
    step = max(1, _BLOCK_CELLS // grid.shape[0])
    for start in range(0, alphas.shape[0], step):
        s = _fractional_sums(alphas[start : start + step], grid)
        for j, (lo, hi) in enumerate(ends):
            out[start : start + step, j] = _integers_strictly_inside(lo - s, hi - s).sum(axis=1)
    return out


def count_visits_joint(alpha, box: BoxSpec, intervals: Sequence[IntervalSpec]) -> tuple[int, ...]:
    """Joint counts (X^1, ..., X^n) for one rotation vector."""
    return tuple(int(c) for c in count_batch([alpha], box, list(intervals))[0])


def count_visits(alpha, box: BoxSpec, interval: IntervalSpec) -> int:
    return count_visits_joint(alpha, box, [interval])[0]


def boundary_hits(alpha, box: BoxSpec, xi: CenterSymbol, offset) -> int:
    """Number of lattice points landing exactly on xi + offset/N.

    Uses the same floating-point path as the counter, so a nonzero result
    means abutting intervals sharing this endpoint lose additivity.
    """
    iv = IntervalSpec(xi, offset, 1)
    point, _ = iv.endpoints(box.N)
    alpha = np.atleast_2d(np.asarray(alpha, dtype=np.float64))
    s = _fractional_sums(alpha, prefix_grid(box))
    diff = point - s
    return int(np.count_nonzero(diff == np.floor(diff)))

