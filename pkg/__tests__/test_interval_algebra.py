"""
Tests for exact periodic interval sets.
"""

from fractions import Fraction

import pytest

from conftest import random_rational
from src.core.models import Arc, Runner, SpeedValue, in_arc, position
from src.exceptions import InfeasibleScaleError, InvalidParameterError
from src.services.interval_algebra import (
    PeriodicIntervalSet,
    common_period,
    complement,
    covers_period,
    first_interior_point_after,
    first_point_after,
    first_point_at_or_after,
    intersect,
    intersect_all,
    is_empty,
    measure_per_period,
    occupancy,
    union,
    union_all,
)

F = Fraction


def _set(period, *pairs):
    return PeriodicIntervalSet(F(period), tuple((F(lo), F(hi)) for lo, hi in pairs))


def _random_set(rng, period=F(1)):
    """Up to four random closed intervals, possibly degenerate or touching."""
    pieces = []
    for _ in range(rng.randrange(0, 5)):
        lo = random_rational(rng, 24) * period
        hi = min(period, lo + random_rational(rng, 24) * period / 2)
        pieces.append((lo, hi))
    return PeriodicIntervalSet(period, tuple(pieces))


def _regular(a):
    """Drop isolated points, keeping the seam mirror pair."""
    return PeriodicIntervalSet(a.period, tuple((lo, hi) for lo, hi in a.intervals if lo < hi))


def test_normalization_merges_touching_intervals():
    s = _set(1, ("1/4", "1/2"), ("1/2", "3/4"), ("1/8", "1/4"))
    assert s.intervals == ((F(1, 8), F(3, 4)),)


def test_seam_is_mirrored():
    """Test that 0 and P are stored together."""
    s = _set(1, ("0", "1/4"))
    assert s.intervals == ((F(0), F(1, 4)), (F(1), F(1)))
    t = _set(1, ("3/4", "1"))
    assert t.intervals == ((F(0), F(0)), (F(3, 4), F(1)))
    assert s.contains(F(1)) and s.contains(F(2))
    assert t.contains(F(0)) and t.contains(F(3))


def test_constructor_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        _set(0)
    with pytest.raises(InvalidParameterError):
        _set(1, ("1/2", "3/2"))
    with pytest.raises(ValueError):
        _set(1, ("1/2", "1/4"))


def test_lifted_repeats_the_pattern():
    s = _set("1/2", ("0", "1/8"))
    lifted = s.lifted(F(1))
    assert lifted.intervals == ((F(0), F(1, 8)), (F(1, 2), F(5, 8)), (F(1), F(1)))
    with pytest.raises(InvalidParameterError):
        s.lifted(F(3, 4))


def test_lifting_respects_the_interval_budget(monkeypatch):
    from src.core.config import settings

    monkeypatch.setattr(settings, "max_lifted_intervals", 10)
    with pytest.raises(InfeasibleScaleError):
        _set(1, ("0", "1/2")).lifted(F(100))


def test_occupancy_of_a_single_runner():
    runner = Runner(SpeedValue.of(2), F(1, 4))
    occ = occupancy(runner, Arc(F(1, 2), F(1, 4)))
    assert occ.period == F(1, 2)
    assert occ.intervals == ((F(1, 8), F(1, 4)),)


def test_occupancy_wraps_through_the_seam():
    runner = Runner(SpeedValue.of(1), F(0))
    occ = occupancy(runner, Arc(F(3, 4), F(1, 2)))
    assert occ.intervals == ((F(0), F(1, 4)), (F(3, 4), F(1)))
    assert occ.wrapped_intervals() == [(F(3, 4), F(5, 4))]


def test_full_arc_occupancy_covers_the_period():
    runner = Runner(SpeedValue.of(3), F(1, 5))
    assert covers_period(occupancy(runner, Arc(F(0), F(1))))


def test_occupancy_agrees_with_direct_evaluation(rng):
    for _ in range(20):
        speed = F(rng.randrange(1, 8), rng.randrange(1, 4))
        runner = Runner(SpeedValue.of(speed), random_rational(rng))
        arc = Arc(random_rational(rng), F(rng.randrange(1, 97), 97))
        occ = occupancy(runner, arc)
        assert measure_per_period(occ) == arc.arc_length / speed
        for _ in range(1000):
            t = random_rational(rng, 211, 5)
            assert occ.contains(t) == in_arc(position(runner, t), arc)


def test_common_period_is_the_rational_lcm():
    assert common_period([_set("1/2"), _set("1/3")]) == F(1)
    assert common_period([_set("2/3"), _set("3/4")]) == F(6)


def test_union_and_intersection_with_different_periods():
    a = _set("1/2", ("0", "1/8"))
    b = _set("1/3", ("0", "1/6"))
    both = intersect(a, b)
    assert both.period == F(1)
    assert both.contains(F(0)) and both.contains(F(1, 12))
    assert not both.contains(F(1, 4))
    either = union(a, b)
    assert either.contains(F(1, 3) + F(1, 12))
    assert either.contains(F(1, 2) + F(1, 16))


def test_complement_is_the_closure():
    s = _set(1, ("1/4", "1/2"))
    c = complement(s)
    assert c.intervals == ((F(0), F(1, 4)), (F(1, 2), F(1)))
    assert complement(c) == s
    assert covers_period(complement(PeriodicIntervalSet.empty(F(1))))
    assert is_empty(complement(PeriodicIntervalSet.full(F(2))))


def test_isolated_points_vanish_under_double_complement():
    s = _set(1, ("1/4", "1/4"), ("1/2", "3/4"))
    assert complement(complement(s)) == _set(1, ("1/2", "3/4"))


def test_random_pairs_satisfy_set_identities(rng):
    """Inclusion-exclusion holds exactly; double complement fixes regular sets."""
    for _ in range(1000):
        period = F(1, rng.randrange(1, 4))
        a = _random_set(rng, period)
        b = _random_set(rng, F(1, rng.randrange(1, 4)))
        total = measure_per_period(union(a, b)) + measure_per_period(intersect(a, b))
        lifted = common_period([a, b])
        assert total == (
            measure_per_period(a) * (lifted / a.period) + measure_per_period(b) * (lifted / b.period)
        )
        regular = _regular(a)
        assert complement(complement(regular)) == regular
        assert measure_per_period(complement(a)) == a.period - measure_per_period(a)


def test_union_all_is_order_independent(rng):
    sets = [_random_set(rng, F(1, rng.randrange(1, 5))) for _ in range(9)]
    forward = union_all(sets)
    backward = union_all(list(reversed(sets)))
    assert forward == backward
    assert intersect_all(sets) == intersect_all(list(reversed(sets)))
    with pytest.raises(InvalidParameterError):
        union_all([])


def test_first_point_queries():
    s = _set(1, ("1/4", "1/2"))
    assert first_point_at_or_after(s, F(0)) == F(1, 4)
    assert first_point_at_or_after(s, F(1, 3)) == F(1, 3)
    assert first_point_at_or_after(s, F(3, 4)) == F(5, 4)
    assert first_point_after(s, F(1, 4)) == F(3, 8)
    assert first_point_after(s, F(1, 2)) == F(5, 4)
    assert first_point_at_or_after(PeriodicIntervalSet.empty(F(1)), F(0)) is None
    with pytest.raises(InvalidParameterError):
        first_point_at_or_after(s, F(-1))


def test_first_point_after_isolated_points():
    s = _set(1, ("1/2", "1/2"))
    assert first_point_after(s, F(0)) == F(1, 2)
    assert first_point_after(s, F(1, 2)) == F(3, 2)


def test_first_interior_point_skips_isolated_points():
    s = _set(1, ("1/8", "1/8"), ("1/2", "3/4"))
    assert first_interior_point_after(s, F(0)) == F(5, 8)
    assert first_interior_point_after(s, F(5, 8)) == F(11, 16)
    assert first_interior_point_after(s, F(3, 4)) == F(13, 8)
    assert first_interior_point_after(_set(1, ("1/8", "1/8")), F(0)) is None
