"""Interval algebra: frozen examples plus pointwise oracles on the grid."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from crosscheck.intervals import (
    Interval,
    IntervalSet,
    from_pairs,
    intersect,
    normalize,
    occupancy_to_start_windows,
    subtract,
)


def members(s: IntervalSet, lo: int, hi: int) -> set[int]:
    """Pointwise oracle: every integer in [lo, hi) covered by the set."""
    return {t for t in range(lo, hi) if any(iv.start <= t < iv.end for iv in s)}


def raw_members(pairs, lo, hi) -> set[int]:
    return {t for t in range(lo, hi) if any(a <= t < b for a, b in pairs)}


# -- normalize ---------------------------------------------------------------


def test_normalize_empty():
    assert normalize([]).pairs() == []


def test_normalize_merges_touching():
    assert from_pairs([[5, 10], [0, 5]]).pairs() == [[0, 10]]


def test_normalize_overlap_example():
    # Oracle: membership over 0..9 of the raw union.
    raw = [[0, 3], [2, 6], [8, 9]]
    result = from_pairs(raw)
    assert result.pairs() == [[0, 6], [8, 9]]
    assert members(result, 0, 10) == raw_members(raw, 0, 10)


def test_normalize_rejects_inverted():
    with pytest.raises(ValueError):
        normalize([(5, 5)])
    with pytest.raises(ValueError):
        normalize([(7, 3)])


# -- intersect ---------------------------------------------------------------


def test_intersect_idempotent():
    a = from_pairs([[0, 10]])
    assert intersect(a, a).pairs() == [[0, 10]]


def test_intersect_disjoint():
    assert intersect(from_pairs([[0, 5]]), from_pairs([[5, 10]])).pairs() == []


def test_intersect_example():
    a = from_pairs([[0, 4], [6, 12]])
    b = from_pairs([[2, 8]])
    got = intersect(a, b)
    assert got.pairs() == [[2, 4], [6, 8]]
    assert members(got, 0, 12) == members(a, 0, 12) & members(b, 0, 12)


def test_intersect_with_universe_is_identity():
    universe = from_pairs([[0, 100]])
    a = from_pairs([[3, 9], [40, 41]])
    assert intersect(a, universe).pairs() == a.pairs()


# -- subtract ----------------------------------------------------------------


def test_subtract_nothing():
    assert subtract(from_pairs([[0, 10]]), IntervalSet(())).pairs() == [[0, 10]]


def test_subtract_everything():
    a = from_pairs([[0, 10]])
    assert subtract(a, a).pairs() == []


def test_subtract_example():
    a = from_pairs([[0, 10]])
    b = from_pairs([[3, 5], [7, 8]])
    got = subtract(a, b)
    assert got.pairs() == [[0, 3], [5, 7], [8, 10]]
    assert members(got, 0, 10) == members(a, 0, 10) - members(b, 0, 10)


# -- occupancy -> start windows ---------------------------------------------


def start_oracle(occ: IntervalSet, d: int, lo: int, hi: int) -> set[int]:
    """s is a valid start iff [s, s+d) fits inside the occupancy."""
    pts = members(occ, lo, hi + d)
    return {s for s in range(lo, hi) if all(t in pts for t in range(s, s + d))}


def test_start_windows_exact_fit():
    assert occupancy_to_start_windows(from_pairs([[0, 100]]), 100).pairs() == [[0, 1]]


def test_start_windows_too_short():
    assert occupancy_to_start_windows(from_pairs([[0, 50]]), 60).pairs() == []


def test_start_windows_example():
    occ = from_pairs([[0, 30], [40, 100]])
    got = occupancy_to_start_windows(occ, 20)
    assert got.pairs() == [[0, 11], [40, 81]]
    assert members(got, 0, 100) == start_oracle(occ, 20, 0, 100)


def test_start_windows_rejects_nonpositive_duration():
    with pytest.raises(ValueError):
        occupancy_to_start_windows(from_pairs([[0, 5]]), 0)


# -- properties --------------------------------------------------------------

interval_lists = st.lists(
    st.tuples(st.integers(0, 200), st.integers(1, 40)).map(lambda p: (p[0], p[0] + p[1])),
    max_size=12,
)


@given(interval_lists)
def test_normalize_idempotent_and_membership(pairs):
    once = normalize(pairs)
    twice = normalize(once.intervals)
    assert once == twice
    assert members(once, 0, 250) == raw_members(pairs, 0, 250)
    # Canonical: sorted, disjoint, non-touching.
    for a, b in zip(once.intervals, once.intervals[1:]):
        assert a.end < b.start


@given(interval_lists, interval_lists)
def test_de_morgan_duality(pa, pb):
    universe = from_pairs([[0, 250]])
    a, b = normalize(pa), normalize(pb)
    lhs = subtract(universe, intersect(a, b))
    rhs = subtract(universe, a).union(subtract(universe, b))
    assert lhs == rhs
    lhs2 = subtract(universe, a.union(b))
    rhs2 = intersect(subtract(universe, a), subtract(universe, b))
    assert lhs2 == rhs2


@given(interval_lists, st.integers(1, 30))
@settings(max_examples=60)
def test_start_windows_containment_oracle(pairs, d):
    occ = normalize(pairs)
    got = occupancy_to_start_windows(occ, d)
    assert members(got, 0, 250) == start_oracle(occ, d, 0, 250)


def test_contains_and_contains_interval():
    s = from_pairs([[0, 5], [10, 20]])
    assert s.contains(0) and s.contains(4) and not s.contains(5)
    assert s.contains(10) and not s.contains(20)
    assert s.contains_interval(Interval(12, 20))
    assert not s.contains_interval(Interval(4, 11))
