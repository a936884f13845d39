"""Exact centers on the circle, their grouping, and orbit closures."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

# Evaluators return the value mod 1.
IRRATIONALS: dict[str, Callable[[], float]] = {
    "sqrt2": lambda: math.sqrt(2.0) - 1.0,
    "sqrt3": lambda: math.sqrt(3.0) - 1.0,
    "golden": lambda: (math.sqrt(5.0) - 1.0) / 2.0,
    "e": lambda: math.e - 2.0,
    "pi-frac": lambda: math.pi - 3.0,
}


@dataclass(frozen=True)
class CenterSymbol:
    """A point of R/Z known exactly: a reduced rational or a named irrational."""

    kind: str  # "rational" | "irrational"
    value: Fraction | None = None
    tag: str | None = None

    def __post_init__(self):
        if self.kind == "rational":
            if self.value is None:
                raise ValueError("rational center needs a value")
            object.__setattr__(self, "value", Fraction(self.value) % 1)
        elif self.kind == "irrational":
            if self.tag not in IRRATIONALS:
                raise ValueError(
                    f"unknown irrational tag {self.tag!r}; known: {sorted(IRRATIONALS)}"
                )
        else:
            raise ValueError(f"unknown center kind {self.kind!r}")

    @classmethod
    def rational(cls, p, q=1) -> CenterSymbol:
        return cls("rational", value=Fraction(p, q))

    @classmethod
    def irrational(cls, tag: str) -> CenterSymbol:
        return cls("irrational", tag=tag)

    @classmethod
    def parse(cls, text) -> CenterSymbol:
        """Parse ``"p/q"``, an integer, or ``"irr:<tag>"``."""
        if isinstance(text, CenterSymbol):
            return text
        if isinstance(text, (int, Fraction)):
            return cls.rational(text)
        if not isinstance(text, str):
            raise ValueError(f"center must be a string like '1/2' or 'irr:sqrt2', got {text!r}")
        s = text.strip()
        if s.startswith("irr:"):
            return cls.irrational(s[4:])
        try:
            num, _, den = s.partition("/")
            return cls.rational(int(num), int(den) if den else 1)
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"malformed center symbol {text!r}") from None

    @property
    def is_rational(self) -> bool:
        return self.kind == "rational"

    def __float__(self) -> float:
        if self.kind == "rational":
            return float(self.value)
        return IRRATIONALS[self.tag]()

    def __str__(self) -> str:
        if self.kind == "rational":
            v = self.value
            return f"{v.numerator}/{v.denominator}"
        return f"irr:{self.tag}"


@dataclass(frozen=True)
class OrbitClosure:
    """Closure of {k xi : k in Z} in the n-torus.

    ``kind`` is ``"finite-cyclic"`` (all centers rational), ``"full-torus"``
    (pairwise distinct irrational tags) or ``"product"`` over equality
    classes, in which case ``factors`` lists the per-class closures.
    """

    kind: str
    dims: int
    order: int | None = None
    generator: tuple[Fraction, ...] | None = None
    factors: tuple[tuple[tuple[int, ...], str], ...] = ()

    def contains(self, point: Sequence[Fraction]) -> bool:
        """Membership test, finite-cyclic case only."""
        if self.kind != "finite-cyclic":
            raise NotImplementedError("membership is exact only for rational orbits")
        return any(
            all((k * g - x) % 1 == 0 for g, x in zip(self.generator, point))
            for k in range(self.order)
        )


def group_centers(xis: Sequence[CenterSymbol]) -> list[list[int]]:
    """Partition indices by exact symbol equality, in order of first appearance."""
    groups: dict[CenterSymbol, list[int]] = {}
    for i, xi in enumerate(xis):
        groups.setdefault(CenterSymbol.parse(xi), []).append(i)
    return list(groups.values())


def orbit_closure_rational(xis: Sequence) -> OrbitClosure:
    fracs = []
    for xi in xis:
        xi = CenterSymbol.parse(xi)
        if not xi.is_rational:
            raise ValueError(f"orbit_closure_rational needs rational centers, got {xi}")
        fracs.append(xi.value)
    order = math.lcm(*(f.denominator for f in fracs)) if fracs else 1
    return OrbitClosure("finite-cyclic", len(fracs), order=order, generator=tuple(fracs))


def orbit_closure(xis: Sequence[CenterSymbol]) -> OrbitClosure:
    """Orbit closure under the convention that distinct irrational tags are independent."""
    xis = [CenterSymbol.parse(x) for x in xis]
    if all(x.is_rational for x in xis):
        return orbit_closure_rational(xis)
    groups = group_centers(xis)
    if all(not x.is_rational for x in xis) and all(len(g) == 1 for g in groups):
        return OrbitClosure("full-torus", len(xis))
    factors = []
    rational_idx = tuple(i for i, x in enumerate(xis) if x.is_rational)
    if rational_idx:
        q = math.lcm(*(xis[i].value.denominator for i in rational_idx))
        factors.append((rational_idx, f"cyclic of order {q}"))
    for g in groups:
        if not xis[g[0]].is_rational:
            factors.append((tuple(g), "diagonal circle" if len(g) > 1 else "circle"))
    return OrbitClosure("product", len(xis), factors=tuple(factors))


def tau_mod_orbit(taus: Sequence, closure: OrbitClosure) -> tuple[Fraction, ...]:
    """Offsets reduced modulo (1/q)Z, reported for rational orbits only."""
    if closure.kind != "finite-cyclic":
        raise ValueError("tau reduction is only reported for rational centers")
    step = Fraction(1, closure.order)
    return tuple(Fraction(t) % step for t in taus)


def intervals_overlap(a: tuple, b: tuple) -> bool:
    """Whether the open intervals (a0, a1) and (b0, b1) meet."""
    return max(a[0], b[0]) < min(a[1], b[1])


def independence_predicate(intervals) -> bool:
    """True iff no two intervals with equal centers have overlapping targets.

    This is the criterion for the large-d limit of the joint law to be a
    product of independent Poisson laws.
    """
    intervals = list(intervals)
    for i in range(len(intervals)):
        for j in range(i + 1, len(intervals)):
            u, v = intervals[i], intervals[j]
            if u.xi == v.xi and intervals_overlap(u.bounds, v.bounds):
                return False
    return True
