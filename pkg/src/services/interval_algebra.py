"""
Exact algebra of periodic subsets of the time axis.

A ``PeriodicIntervalSet`` is a period P plus sorted, disjoint, non-touching
closed intervals inside [0, P]. Time t belongs to the set iff ``t mod P`` lies
in one of them. Because 0 and P name the same instant, the seam is stored
mirrored: 0 is a member iff one interval starts at 0 and one ends at P. A run
that wraps through the seam is therefore kept in split form; see
``wrapped_intervals`` for the merged presentation.
"""

import bisect
import logging
from concurrent.futures import Executor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Optional, Sequence, Tuple

from src.core.config import settings
from src.core.models import Arc, Circle, Runner, UNIT_CIRCLE
from src.core.rational import frac_mod, rational_lcm, to_rational
from src.exceptions import InfeasibleScaleError, InvalidParameterError

logger = logging.getLogger(__name__)

Interval = Tuple[Fraction, Fraction]


def _normalize(intervals: Iterable[Interval], period: Fraction) -> Tuple[Interval, ...]:
    merged: List[List[Fraction]] = []
    for lo, hi in sorted(intervals):
        if lo > hi:
            raise ValueError(f"reversed interval [{lo}, {hi}]")
        if merged and lo <= merged[-1][1]:
            if hi > merged[-1][1]:
                merged[-1][1] = hi
        else:
            merged.append([lo, hi])
    if merged:
        if merged[0][0] == 0 and merged[-1][1] != period:
            merged.append([period, period])
        elif merged[-1][1] == period and merged[0][0] != 0:
            merged.insert(0, [Fraction(0), Fraction(0)])
    return tuple((lo, hi) for lo, hi in merged)


@dataclass(frozen=True)
class PeriodicIntervalSet:
    """A P-periodic finite union of closed intervals; always normalized."""
    period: Fraction
    intervals: Tuple[Interval, ...] = ()

    def __post_init__(self):
        period = to_rational(self.period)
        if period <= 0:
            raise InvalidParameterError(f"period must be positive, got {period}")
        cleaned = []
        for lo, hi in self.intervals:
            lo, hi = to_rational(lo), to_rational(hi)
            if lo < 0 or hi > period:
                raise InvalidParameterError(f"interval [{lo}, {hi}] outside [0, {period}]")
            cleaned.append((lo, hi))
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "intervals", _normalize(cleaned, period))

    @classmethod
    def empty(cls, period: Fraction) -> "PeriodicIntervalSet":
        return cls(period, ())

    @classmethod
    def full(cls, period: Fraction) -> "PeriodicIntervalSet":
        return cls(period, ((Fraction(0), to_rational(period)),))

    def contains(self, t: Fraction) -> bool:
        r = frac_mod(to_rational(t), self.period)
        index = bisect.bisect_left(self._his(), r)
        return index < len(self.intervals) and self.intervals[index][0] <= r

    def _his(self) -> List[Fraction]:
        return [hi for _, hi in self.intervals]

    def lifted(self, period: Fraction) -> "PeriodicIntervalSet":
        """The same set described over a multiple of its period."""
        period = to_rational(period)
        ratio = period / self.period
        if ratio.denominator != 1 or ratio < 1:
            raise InvalidParameterError(f"{period} is not a multiple of period {self.period}")
        copies = int(ratio)
        if copies == 1:
            return self
        if copies * max(len(self.intervals), 1) > settings.max_lifted_intervals:
            raise InfeasibleScaleError(
                f"lifting {len(self.intervals)} intervals by a factor {copies} exceeds "
                f"the budget of {settings.max_lifted_intervals} intervals"
            )
        shifted = [
            (lo + j * self.period, hi + j * self.period)
            for j in range(copies)
            for lo, hi in self.intervals
        ]
        return PeriodicIntervalSet(period, tuple(shifted))

    def open_gaps(self) -> List[Interval]:
        """
        Maximal open gaps ``(lo, hi)`` of one period. The seam gap is reported
        unwrapped, so its ``hi`` may exceed P.
        """
        if not self.intervals:
            return [(Fraction(0), self.period)]
        gaps = [
            (self.intervals[i][1], self.intervals[i + 1][0])
            for i in range(len(self.intervals) - 1)
        ]
        first_lo = self.intervals[0][0]
        last_hi = self.intervals[-1][1]
        if first_lo > 0 or last_hi < self.period:
            gaps.append((last_hi, self.period + first_lo))
        return gaps

    def wrapped_intervals(self) -> List[Interval]:
        """Presentation form: a run through the seam becomes one interval ending past P."""
        items = list(self.intervals)
        if len(items) > 1 and items[0][0] == 0 and items[-1][1] == self.period:
            head = items.pop(0)
            tail = items.pop()
            items.append((tail[0], self.period + head[1]))
        return items


def occupancy(runner: Runner, arc: Arc, circle: Circle = UNIT_CIRCLE) -> PeriodicIntervalSet:
    """
    Times at which ``runner`` is inside the closed ``arc``.

    The runner reaches the arc start at t0 = ((start - beta) mod L) / v and
    stays for arc_length / v, once per lap of duration L / v.
    """
    v = runner.speed.as_rational()
    arc.validate_on(circle)
    period = circle.length / v
    if arc.is_full(circle):
        return PeriodicIntervalSet.full(period)
    enter = circle.wrap(arc.start - runner.start) / v
    leave = enter + arc.arc_length / v
    if leave <= period:
        pieces = [(enter, leave)]
    else:
        pieces = [(enter, period), (Fraction(0), leave - period)]
    return PeriodicIntervalSet(period, tuple(pieces))


def common_period(sets: Sequence[PeriodicIntervalSet]) -> Fraction:
    """Least common multiple of the periods."""
    if not sets:
        raise InvalidParameterError("common period of an empty list")
    return rational_lcm(s.period for s in sets)


def _lift_pair(a: PeriodicIntervalSet, b: PeriodicIntervalSet):
    period = common_period([a, b])
    return a.lifted(period), b.lifted(period), period


def union(a: PeriodicIntervalSet, b: PeriodicIntervalSet) -> PeriodicIntervalSet:
    a, b, period = _lift_pair(a, b)
    return PeriodicIntervalSet(period, a.intervals + b.intervals)


def intersect(a: PeriodicIntervalSet, b: PeriodicIntervalSet) -> PeriodicIntervalSet:
    a, b, period = _lift_pair(a, b)
    left, right = a.intervals, b.intervals
    pieces = []
    i = j = 0
    while i < len(left) and j < len(right):
        lo = max(left[i][0], right[j][0])
        hi = min(left[i][1], right[j][1])
        if lo <= hi:
            pieces.append((lo, hi))
        if left[i][1] < right[j][1]:
            i += 1
        else:
            j += 1
    return PeriodicIntervalSet(period, tuple(pieces))


def complement(a: PeriodicIntervalSet) -> PeriodicIntervalSet:
    """
    Closure of the complement. Boundary points belong to both a set and its
    complement; isolated points of ``a`` leave no trace.
    """
    period = a.period
    if is_empty(a):
        return PeriodicIntervalSet.full(period)
    if covers_period(a):
        return PeriodicIntervalSet.empty(period)
    pieces = []
    for lo, hi in a.open_gaps():
        if hi <= period:
            pieces.append((lo, hi))
        else:
            pieces.append((lo, period))
            pieces.append((Fraction(0), hi - period))
    return PeriodicIntervalSet(period, tuple(pieces))


def union_all(sets: Sequence[PeriodicIntervalSet], executor: Optional[Executor] = None) -> PeriodicIntervalSet:
    """
    Union of many sets by pairwise tree merging; with an ``executor`` each level
    is merged in parallel. The normalized result does not depend on merge order.
    """
    return _reduce_tree(list(sets), union, executor)


def intersect_all(sets: Sequence[PeriodicIntervalSet], executor: Optional[Executor] = None) -> PeriodicIntervalSet:
    return _reduce_tree(list(sets), intersect, executor)


def _reduce_tree(level, operation, executor):
    if not level:
        raise InvalidParameterError("cannot combine an empty list of sets")
    while len(level) > 1:
        lefts, rights = level[0::2], level[1::2]
        carry = [lefts.pop()] if len(lefts) > len(rights) else []
        if executor is not None:
            merged = list(executor.map(operation, lefts, rights))
        else:
            merged = [operation(x, y) for x, y in zip(lefts, rights)]
        level = merged + carry
    return level[0]


def is_empty(a: PeriodicIntervalSet) -> bool:
    return not a.intervals


def covers_period(a: PeriodicIntervalSet) -> bool:
    return a.intervals == ((Fraction(0), a.period),)


def measure_per_period(a: PeriodicIntervalSet) -> Fraction:
    return sum((hi - lo for lo, hi in a.intervals), Fraction(0))


def first_point_at_or_after(a: PeriodicIntervalSet, T: Fraction) -> Optional[Fraction]:
    """Smallest member t >= T, or None for the empty set; always t < T + P."""
    T = to_rational(T)
    if T < 0:
        raise InvalidParameterError(f"T must be >= 0, got {T}")
    if is_empty(a):
        return None
    r = frac_mod(T, a.period)
    base = T - r
    index = bisect.bisect_left(a._his(), r)
    if index < len(a.intervals):
        lo, _ = a.intervals[index]
        return T if lo <= r else base + lo
    return base + a.period + a.intervals[0][0]


def first_point_after(a: PeriodicIntervalSet, T: Fraction) -> Optional[Fraction]:
    """
    A member strictly greater than T. When T sits inside an interval that
    continues past T no least such member exists; the midpoint between T and the
    interval's right end is returned instead.
    """
    T = to_rational(T)
    found = first_point_at_or_after(a, T)
    if found is None or found > T:
        return found
    r = frac_mod(T, a.period)
    base = T - r
    his = a._his()
    index = bisect.bisect_left(his, r)
    lo, hi = a.intervals[index]
    if hi > r:
        return base + (r + hi) / 2
    # T is a right endpoint or an isolated point: move on to the next interval
    if index + 1 < len(a.intervals):
        return base + a.intervals[index + 1][0]
    return base + a.period + a.intervals[0][0]


def first_interior_point_after(a: PeriodicIntervalSet, T: Fraction) -> Optional[Fraction]:
    """
    A point t > T in the interior of ``a``: the midpoint of the first stretch of
    an interval lying beyond T. None when ``a`` has empty interior.
    """
    T = to_rational(T)
    r = frac_mod(T, a.period)
    base = T - r
    best = None
    for lo, hi in a.wrapped_intervals():
        if lo == hi:
            continue
        for shift in (-a.period, Fraction(0), a.period):
            start, end = base + shift + lo, base + shift + hi
            if end <= T:
                continue
            start = max(start, T)
            if best is None or start < best[0]:
                best = (start, end)
    if best is None:
        return None
    return (best[0] + best[1]) / 2
