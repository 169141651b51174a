from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cantorgap.construction import base_names, clog2
from cantorgap.cube import ClopenSet, Coordinate, PartialAssignment, cylinder
from cantorgap.gapcore import (ConcretePregap, Label, RandomSubsetName, classify_K, classify_L,
                               delta_system, format_pregap, interpolates_mod_k, is_homogeneous,
                               isomorphism_type, largest_delta_system, min_cut, name_event,
                               parse_pregap, uniformize)


def pregap(**pairs):
    return ConcretePregap.from_pairs(pairs, horizon=16)


def test_classify_K_examples():
    g = pregap(i=({0}, {1}), j=({2}, {3}))
    assert classify_K(g, "i", "j") is Label.K0
    g = pregap(i=({0}, set()), j=(set(), {0}))
    assert classify_K(g, "i", "j") is Label.K1
    g = pregap(i=({0, 4}, {2}), j=({1}, {4}))
    assert classify_K(g, "i", "j") is Label.K1
    with pytest.raises(KeyError):
        classify_K(g, "i", "z")


def test_classify_L_examples():
    g = pregap(i=({0}, set()), j=(set(), {0}))
    assert classify_L(g, "i", "j", 1) is Label.L0
    assert classify_L(g, "i", "j", 0) is Label.L1
    g = pregap(i=({3}, {5}))
    assert all(classify_L(g, "i", "i", k) is Label.L0 for k in range(5))


def test_homogeneity_examples():
    g = pregap(i=({0}, {1}), j=({2}, {3}), l=({4}, {5}), z=(set(), {0}))
    assert is_homogeneous(g, ["i"], Label.L0)
    assert not is_homogeneous(g, ["i", "z"], Label.K0)
    assert is_homogeneous(g, ["i", "j", "l"], Label.K0)
    assert is_homogeneous(g, ["i", "j", "l"], Label.L0, 0)


def test_min_cut_examples():
    g = pregap(i=({0}, {1}), j=({2}, {3}))
    assert min_cut(g, ["i", "j"]) == 0
    g = pregap(i=({5}, set()), j=(set(), {5}))
    assert min_cut(g, ["i", "j"]) == 6
    g = pregap(i=({2}, set()), j=(set(), {2, 7}), l=({7}, set()))
    assert min_cut(g, ["i", "j", "l"]) == 8


def test_delta_system_examples():
    disjoint = [{1}, {2, 3}, {4}]
    ds = delta_system(disjoint, 3)
    assert ds.root == frozenset() and len(ds) == 3
    same = [{1, 2}] * 4
    ds = delta_system(same, 4)
    assert ds.root == {1, 2} and len(ds) == 4
    ds = delta_system([{1, 2}, {1, 3}, {1, 4}, {2, 3}], 3)
    assert ds.root == {1} and set(ds.petals) == {frozenset({1, 2}), frozenset({1, 3}),
                                                  frozenset({1, 4})}
    assert delta_system([{1}], 2) is None


def _brute_largest(sets):
    for size in range(len(sets), 0, -1):
        for sub in combinations(range(len(sets)), size):
            inter = {frozenset(sets[i]) & frozenset(sets[j]) for i, j in combinations(sub, 2)}
            if len(inter) <= 1:
                return size
    return 0


@settings(max_examples=60)
@given(st.lists(st.frozensets(st.integers(0, 5), min_size=2, max_size=2), min_size=1,
                max_size=9))
def test_delta_system_matches_exhaustive_oracle(sets):
    ds = largest_delta_system(sets)
    assert ds.verify()
    assert len(ds) == _brute_largest(sets)


def test_uniformize_examples():
    assert uniformize([1, 1, 1], [lambda v: v]) == [1, 1, 1]
    assert uniformize(["ab", "cd", "efg"], [len]) == ["ab", "cd"]
    root = {Coordinate(0, 0)}
    s1 = PartialAssignment({Coordinate(0, 0): 1, Coordinate(3, 4): 0})
    s2 = PartialAssignment({Coordinate(0, 0): 1, Coordinate(5, 9): 0})
    s3 = PartialAssignment({Coordinate(0, 0): 0, Coordinate(5, 9): 0})
    got = uniformize([s1, s2, s3], [lambda s: isomorphism_type(s, root)])
    assert got == [s1, s2]


def test_isomorphism_type_respects_order():
    a, b, r = Coordinate(1, 0), Coordinate(2, 0), Coordinate(0, 0)
    x = (cylinder({a: 0}), PartialAssignment({b: 1, r: 0}))
    y = (cylinder({Coordinate(5, 0): 0}), PartialAssignment({Coordinate(7, 0): 1, r: 0}))
    z = (cylinder({Coordinate(7, 0): 0}), PartialAssignment({Coordinate(5, 0): 1, r: 0}))
    assert isomorphism_type(x, {r}) == isomorphism_type(y, {r})
    assert isomorphism_type(x, {r}) != isomorphism_type(z, {r})


def test_interpolation_examples():
    assert interpolates_mod_k({1}, [], 3)
    assert not interpolates_mod_k(set(), [({4}, set())], 2)
    F = [({1, 5}, {2}), ({6}, {0, 7})]
    assert interpolates_mod_k({1, 5, 6}, F, 0)


sets = st.frozensets(st.integers(0, 9), max_size=4)
pairs = st.lists(st.tuples(sets, sets), max_size=4)


@given(sets, pairs, pairs, st.integers(0, 10))
def test_interpolation_splits_over_union(d, F, G, k):
    assert interpolates_mod_k(d, F + G, k) == (interpolates_mod_k(d, F, k)
                                               and interpolates_mod_k(d, G, k))


@st.composite
def pregaps(draw, club=False):
    n = draw(st.integers(1, 5))
    out = {}
    for i in range(n):
        a = draw(sets)
        b = draw(sets)
        out[i] = (a, b - a) if club else (a, b)
    return ConcretePregap.from_pairs(out, horizon=10)


@given(pregaps(), st.integers(0, 10), st.integers(0, 10))
def test_partition_symmetry_and_monotonicity(g, k, extra):
    for i, j in combinations(g.indices, 2):
        assert classify_K(g, i, j) is classify_K(g, j, i)
        assert classify_L(g, i, j, k) is classify_L(g, j, i, k)
        if classify_L(g, i, j, k) is Label.L0:
            assert classify_L(g, i, j, k + extra) is Label.L0


@given(pregaps(club=True))
def test_K0_iff_L0_under_club(g):
    assert g.satisfies_club()
    J = g.indices
    assert is_homogeneous(g, J, Label.K0) == is_homogeneous(g, J, Label.L0, 0)
    assert (min_cut(g, J) == 0) == is_homogeneous(g, J, Label.L0, 0)


@given(pregaps(club=True), st.integers(0, 10))
def test_merge_of_homogeneous_tuples(g, k):
    # two L0^k tuples with equal traces below k merge into a K0 family above k
    J = g.indices
    half = len(J) // 2
    left, right = J[:half], J[half:2 * half]
    if not left or not is_homogeneous(g, left + right, Label.L0, k):
        return
    trace = lambda i: (frozenset(n for n in g.a[i] if n < k), frozenset(n for n in g.b[i] if n < k))  # noqa: E731
    if [trace(i) for i in left] != [trace(i) for i in right]:
        return
    cut = ConcretePregap.from_pairs(
        {i: ({n for n in g.a[i] if n >= k}, {n for n in g.b[i] if n >= k}) for i in J}, 10)
    assert is_homogeneous(cut, left + right, Label.K0)


def test_pregap_text_round_trip():
    text = "0 : a = {0, 3} ; b = {1}\n1 : a = {} ; b = {2, 4}\n"
    g = parse_pregap(text)
    assert format_pregap(g) == text
    with pytest.raises(ValueError):
        parse_pregap("0 : a = {1}")
    with pytest.raises(ValueError):
        ConcretePregap(3, {0: {5}}, {0: set()})


def test_name_events():
    c = Coordinate
    ev = (cylinder({c(0, 0): 1}), cylinder({c(0, 1): 0}))
    a = RandomSubsetName(2, ev)
    assert name_event(a, a, "subset_beyond_k", 0).is_whole()
    b = RandomSubsetName(2, tuple(~e for e in ev))
    assert all(name_event(a, b, "nonempty_intersection_beyond_k", k).is_empty() for k in range(3))
    assert name_event(a, b, "difference_at_n", 1) == ev[1]
    with pytest.raises(IndexError):
        name_event(a, b, "intersection_at_n", 2)
    C, _ = base_names(0, 8)
    _, D = base_names(1, 8)
    for n in range(8):
        assert name_event(C, D, "intersection_at_n", n).measure() == \
            ClopenSet.whole().measure() / 4 ** clog2(n + 2)


def test_name_round_trip():
    c, _ = base_names(2, 5)
    assert RandomSubsetName.from_lines(c.to_lines()) == c
