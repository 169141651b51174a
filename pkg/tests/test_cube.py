from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorgap.cube import (ClopenSet, Coordinate, Dyadic, PartialAssignment, PreconditionError,
                            UndefinedConditional, combine, conditional, cylinder,
                            determining_coords, distance, measure, monte_carlo_frequency,
                            project_below, split_half)

from conftest import COORDS, assignments, brute_measure, clopens, points

c0, c1, c5 = Coordinate(0, 0), Coordinate(0, 1), Coordinate(0, 5)


def test_cylinder_examples():
    assert cylinder({}).is_whole() and measure(cylinder({})) == 1
    assert measure(cylinder({c0: 0})) == Fraction(1, 2)
    assert measure(cylinder({c0: 0, c5: 1})) == Fraction(1, 4)


def test_combine_examples():
    s, t = cylinder({c0: 0}), cylinder({c0: 1})
    assert combine(s, t, "meet").is_empty()
    assert measure(combine(cylinder({c0: 0}), cylinder({c1: 0}), "join")) == Fraction(3, 4)
    assert measure(combine(cylinder({c0: 0, c1: 1}), None, "complement")) == Fraction(3, 4)
    assert combine(s, t, "difference") == s


def test_measure_examples():
    assert measure(ClopenSet.whole()) == 1
    full = ClopenSet.from_cylinders(PartialAssignment({c0: a, c1: b}) for a in (0, 1) for b in (0, 1))
    assert full.is_whole() and measure(full) == 1
    # window of n=1 has length 2
    assert measure(cylinder({Coordinate(0, 1): 0, Coordinate(0, 2): 0})) == Fraction(1, 4)


def test_conditional_examples():
    x = cylinder({c0: 0})
    assert conditional(x, x) == 1
    assert conditional(cylinder({c0: 1}), cylinder({c1: 0})) == Fraction(1, 2)
    assert conditional(cylinder({c0: 0, c1: 0}), cylinder({c0: 0})) == Fraction(1, 2)
    with pytest.raises(UndefinedConditional):
        conditional(x, ClopenSet.empty())


def test_determining_coords_examples():
    s = PartialAssignment({c0: 0, c5: 1})
    assert determining_coords(cylinder(s)) == s.domain
    x = cylinder({c0: 0, c1: 0}) | cylinder({c0: 1, c1: 0})
    assert determining_coords(x) == {c1}
    assert determining_coords(ClopenSet.whole()) == frozenset()


def test_project_below_examples():
    t = PartialAssignment({c0: 1})
    s = PartialAssignment({c0: 1, c1: 0})
    assert project_below(cylinder(s), t) == cylinder({c1: 0})
    assert project_below(cylinder(t), t).is_whole()
    y = cylinder({c5: 1}) | cylinder({c1: 0})
    assert project_below(cylinder(t) & y, t) == y
    with pytest.raises(PreconditionError):
        project_below(cylinder({c1: 0}), t)


def test_split_half_examples():
    f = Coordinate(9, 0)
    assert split_half(ClopenSet.whole(), [f]) == cylinder({f: 0})
    s = PartialAssignment({c0: 1})
    assert split_half(cylinder(s), [f]) == cylinder(s | PartialAssignment({f: 0}))
    e = ~cylinder({c0: 0, c1: 0})
    half = split_half(e, [f])
    assert half <= e and measure(half) == Fraction(3, 8)
    with pytest.raises(PreconditionError):
        split_half(cylinder({c0: 0}), [])
    with pytest.raises(PreconditionError):
        split_half(ClopenSet.empty(), [f])


def test_serialization():
    assert str(Dyadic(3, 3)) == "3/2^3" and Dyadic.parse("6/2^4") == Fraction(3, 8)
    s = PartialAssignment({c0: 1, Coordinate(2, 7): 0})
    assert str(s) == "(0.0=1,2.7=0)" and PartialAssignment.parse(str(s)) == s
    x = cylinder({c0: 0}) | cylinder({c1: 1, c5: 0})
    assert ClopenSet.parse(str(x)) == x
    with pytest.raises(ValueError):
        PartialAssignment([(c0, 0), (c0, 1)])


@given(assignments())
def test_cylinder_measure_law(s):
    assert measure(cylinder(s)) == Fraction(1, 2 ** len(s))


@given(clopens())
def test_measure_matches_truth_table(x):
    assert measure(x) == brute_measure(x)


@given(clopens(), clopens())
def test_semantic_equality_is_pointwise(x, y):
    same = all(x.contains(p) == y.contains(p) for p in points(COORDS))
    assert (x == y) == same


@given(clopens())
def test_complement_law(x):
    assert measure(x) + measure(~x) == 1


@given(clopens(), clopens())
def test_additivity(x, y):
    y = y - x
    assert measure(x | y) == measure(x) + measure(y)


@given(clopens(coords=COORDS[:3]), clopens(coords=COORDS[3:]))
def test_independence(x, y):
    assert not determining_coords(x) & determining_coords(y)
    assert measure(x & y) == measure(x) * measure(y)


@given(clopens(), clopens(), clopens())
def test_triangle_inequality(x, y, z):
    assert distance(x, z) <= distance(x, y) + distance(y, z)


@given(clopens(), assignments())
def test_project_round_trip(x, t):
    x = x & cylinder(t)
    y = project_below(x, t)
    assert y & cylinder(t) == x
    assert not determining_coords(y) & t.domain


@given(clopens())
def test_determining_coords_minimal(x):
    det = determining_coords(x)
    for c in COORDS:
        flips = any(x.contains({**p, c: 0}) != x.contains({**p, c: 1}) for p in points(COORDS))
        assert (c in det) == flips


@given(clopens())
def test_split_half_property(x):
    if x.is_empty():
        return
    f = Coordinate(7, 0)
    half = split_half(x, [f])
    assert half <= x and 2 * measure(half) == measure(x)
    assert half.support() <= x.support() | {f}


@settings(max_examples=30)
@given(clopens(), st.integers(0, 2 ** 32 - 1))
def test_monte_carlo_within_four_sigma(x, seed):
    rng = np.random.default_rng(seed)
    mu = Fraction(measure(x))
    freq = monte_carlo_frequency(x, 20000, rng)
    # exact comparison of (freq - mu)^2 against 16 mu (1 - mu) / N
    assert (freq - mu) ** 2 <= 16 * mu * (1 - mu) / 20000 or mu in (0, 1)
