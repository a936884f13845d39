from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from rotvisits.counting import IntervalSpec
from rotvisits.spectrum import (
    CenterSymbol,
    group_centers,
    independence_predicate,
    orbit_closure,
    orbit_closure_rational,
    tau_mod_orbit,
)


@pytest.mark.parametrize("text,kind,value", [("1/2", "rational", Fraction(1, 2)), ("3/2", "rational", Fraction(1, 2)),
                                             ("-1/3", "rational", Fraction(2, 3)), ("0", "rational", Fraction(0)),
                                             ("2/4", "rational", Fraction(1, 2))])
def test_parse_rational(text, kind, value):
    c = CenterSymbol.parse(text)
    assert (c.kind, c.value) == (kind, value)
    assert CenterSymbol.parse(str(c)) == c


def test_parse_irrational_and_float_values():
    c = CenterSymbol.parse("irr:sqrt2")
    assert str(c) == "irr:sqrt2"
    assert float(c) == pytest.approx(2**0.5 - 1)
    assert 0 <= float(CenterSymbol.parse("irr:pi-frac")) < 1
    assert float(CenterSymbol.parse("irr:golden")) == pytest.approx(0.6180339887)


@pytest.mark.parametrize("bad", ["irr:sqrt7", "1/0", "half", "", 0.5, None])
def test_parse_rejects(bad):
    with pytest.raises(ValueError):
        CenterSymbol.parse(bad)


def test_group_centers_examples():
    assert group_centers(["1/2", "1/2", "irr:sqrt2"]) == [[0, 1], [2]]
    assert group_centers(["0", "1/3", "irr:e"]) == [[0], [1], [2]]
    assert group_centers(["irr:sqrt2", "irr:sqrt2"]) == [[0, 1]]


pool = st.sampled_from(["0", "1/2", "1/3", "2/3", "irr:sqrt2", "irr:e"])


@given(st.lists(pool, min_size=1, max_size=8), st.randoms())
def test_group_centers_equivariant(xis, rnd):
    perm = list(range(len(xis)))
    rnd.shuffle(perm)
    permuted = [xis[p] for p in perm]
    original = {frozenset(g) for g in group_centers(xis)}
    mapped = {frozenset(perm[i] for i in g) for g in group_centers(permuted)}
    assert mapped == original


def test_orbit_closure_examples():
    assert orbit_closure_rational(["0"]).order == 1
    c = orbit_closure_rational(["1/2", "1/3"])
    assert c.order == 6
    orbit = {tuple((k * g) % 1 for g in c.generator) for k in range(100)}
    assert len(orbit) == 6
    assert orbit_closure_rational(["2/4"]).order == 2
    with pytest.raises(ValueError):
        orbit_closure_rational(["irr:sqrt2"])


@given(st.lists(st.fractions(0, 1, max_denominator=60), min_size=1, max_size=3))
def test_orbit_order_is_minimal(fracs):
    c = orbit_closure_rational(fracs)
    q = c.order
    assert q <= 10**6
    assert all((q * f) % 1 == 0 for f in fracs)
    assert not any(all((k * f) % 1 == 0 for f in fracs) for k in range(1, min(q, 10**4)))


def test_orbit_closure_kinds_and_membership():
    assert orbit_closure(["irr:sqrt2", "irr:e"]).kind == "full-torus"
    prod = orbit_closure(["irr:sqrt2", "irr:sqrt2", "1/2"])
    assert prod.kind == "product"
    assert ((2,), "cyclic of order 2") in prod.factors
    assert ((0, 1), "diagonal circle") in prod.factors
    c = orbit_closure(["1/2", "1/3"])
    assert c.contains([Fraction(0), Fraction(2, 3)])
    assert not c.contains([Fraction(1, 4), Fraction(0)])
    assert tau_mod_orbit([Fraction(7, 12), 2], c) == (Fraction(1, 12), Fraction(0))


def test_independence_predicate_examples():
    assert independence_predicate([IntervalSpec("1/2", 0, 1), IntervalSpec("1/2", 1, 1)])
    assert not independence_predicate([IntervalSpec("1/2", 0, 1), IntervalSpec("1/2", Fraction(1, 2), Fraction(3, 2))])
    assert independence_predicate([IntervalSpec("1/2", 0, 1), IntervalSpec("irr:sqrt2", 0, 5)])
    assert independence_predicate([IntervalSpec("irr:e", 0, 1)])
