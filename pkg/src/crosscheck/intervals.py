"""Half-open integer-second intervals and canonical disjoint interval sets.

All timeline reasoning in this package happens on an integer-second grid
with half-open intervals [start, end).  An :class:`IntervalSet` is always
kept canonical: sorted ascending, pairwise disjoint, with touching
intervals merged.  That makes membership, intersection and subtraction
exact set operations with no boundary ambiguity.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union


@dataclass(frozen=True, order=True)
class Interval:
    """Half-open interval [start, end) of integer seconds; start < end."""

    start: int
    end: int

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"empty or inverted interval [{self.start}, {self.end})")

    @property
    def length(self) -> int:
        return self.end - self.start

    def contains(self, t: int) -> bool:
        return self.start <= t < self.end

    def contains_interval(self, other: "Interval") -> bool:
        return self.start <= other.start and other.end <= self.end

    def overlaps(self, other: "Interval") -> bool:
        return self.start < other.end and other.start < self.end

    def pair(self) -> list[int]:
        return [self.start, self.end]


RawInterval = Union[Interval, Sequence[int]]


def _as_interval(item: RawInterval) -> Interval:
    if isinstance(item, Interval):
        return item
    start, end = item
    return Interval(int(start), int(end))


@dataclass(frozen=True)
class IntervalSet:
    """Canonical disjoint union of intervals, the currency of window math.

    Instances are immutable; all operations return new sets.  Construct
    through :func:`normalize` unless the input is already canonical.
    """

    intervals: tuple[Interval, ...] = ()

    def __iter__(self) -> Iterator[Interval]:
        return iter(self.intervals)

    def __len__(self) -> int:
        return len(self.intervals)

    def __bool__(self) -> bool:
        return bool(self.intervals)

    @property
    def empty(self) -> bool:
        return not self.intervals

    @property
    def total_seconds(self) -> int:
        return sum(iv.length for iv in self.intervals)

    @property
    def span(self) -> Interval | None:
        if not self.intervals:
            return None
        return Interval(self.intervals[0].start, self.intervals[-1].end)

    def contains(self, t: int) -> bool:
        starts = [iv.start for iv in self.intervals]
        i = bisect_right(starts, t) - 1
        return i >= 0 and t < self.intervals[i].end

    def contains_interval(self, other: Interval) -> bool:
        starts = [iv.start for iv in self.intervals]
        i = bisect_right(starts, other.start) - 1
        return i >= 0 and other.end <= self.intervals[i].end

    def intersect(self, other: "IntervalSet") -> "IntervalSet":
        return intersect(self, other)

    def subtract(self, other: "IntervalSet") -> "IntervalSet":
        return subtract(self, other)

    def union(self, other: "IntervalSet") -> "IntervalSet":
        return normalize(list(self.intervals) + list(other.intervals))

    def start_windows(self, duration: int) -> "IntervalSet":
        return occupancy_to_start_windows(self, duration)

    def pairs(self) -> list[list[int]]:
        return [iv.pair() for iv in self.intervals]


EMPTY_SET = IntervalSet(())


def from_pairs(pairs: Iterable[Sequence[int]]) -> IntervalSet:
    return normalize([_as_interval(p) for p in pairs])


def singleton(start: int, end: int) -> IntervalSet:
    return IntervalSet((Interval(start, end),))


def normalize(items: Iterable[RawInterval]) -> IntervalSet:
    """Sort, merge overlapping/touching intervals; result is order-independent.

    Rejects any input interval with start >= end.
    """
    ivs = sorted(_as_interval(item) for item in items)
    merged: list[Interval] = []
    for iv in ivs:
        if merged and iv.start <= merged[-1].end:
            if iv.end > merged[-1].end:
                merged[-1] = Interval(merged[-1].start, iv.end)
        else:
            merged.append(iv)
    return IntervalSet(tuple(merged))


def intersect(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Points in both sets.  Commutative and associative."""
    out: list[Interval] = []
    i = j = 0
    av, bv = a.intervals, b.intervals
    while i < len(av) and j < len(bv):
        lo = max(av[i].start, bv[j].start)
        hi = min(av[i].end, bv[j].end)
        if lo < hi:
            out.append(Interval(lo, hi))
        if av[i].end <= bv[j].end:
            i += 1
        else:
            j += 1
    return IntervalSet(tuple(out))


def subtract(a: IntervalSet, b: IntervalSet) -> IntervalSet:
    """Points in `a` and not in `b`."""
    out: list[Interval] = []
    j = 0
    bv = b.intervals
    for iv in a.intervals:
        cursor = iv.start
        while j < len(bv) and bv[j].end <= cursor:
            j += 1
        k = j
        while k < len(bv) and bv[k].start < iv.end:
            if bv[k].start > cursor:
                out.append(Interval(cursor, bv[k].start))
            cursor = max(cursor, bv[k].end)
            if cursor >= iv.end:
                break
            k += 1
        if cursor < iv.end:
            out.append(Interval(cursor, iv.end))
    return IntervalSet(tuple(out))


def occupancy_to_start_windows(occ: IntervalSet, duration: int) -> IntervalSet:
    """Convert "the condition holds over [s, e)" into "a task of `duration`
    seconds may start here".

    Each occupancy interval [s, e) with e - s >= duration yields the start
    window [s, e - duration] inclusive, represented as the half-open
    [s, e - duration + 1) on the integer grid.  Shorter intervals vanish.
    """
    if duration <= 0:
        raise ValueError("duration must be positive")
    out = [
        Interval(iv.start, iv.end - duration + 1)
        for iv in occ.intervals
        if iv.length >= duration
    ]
    # Source intervals are disjoint with gaps >= 1, so the shrunken windows
    # stay disjoint and non-touching; no re-normalization needed.
    return IntervalSet(tuple(out))
