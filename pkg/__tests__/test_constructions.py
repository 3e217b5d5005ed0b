"""
Tests for the no-shade and rendezvous constructions.
"""

from fractions import Fraction

import pytest

from conftest import random_rational
from src.core.harmonic import harmonic, partial_harmonics
from src.core.models import Arc, Runner, RunnerSchedule, SpeedValue, UNIT_CIRCLE, in_arc, position
from src.exceptions import InfeasibleScaleError, InvalidParameterError, IrrationalSpeedError
from src.services.constructions import (
    OPEN,
    build_no_shade,
    build_rendezvous_speeds,
    find_rendezvous_time,
    inductive_rendezvous_time,
    min_runner_count,
    rendezvous_schedule,
    rendezvous_set,
    runner_count_estimate,
    verify_no_shade,
)
from src.services.interval_algebra import is_empty, occupancy

F = Fraction


def test_min_runner_count_small_values():
    assert min_runner_count(F(1)) == 1
    assert min_runner_count(F(1, 2)) == 4
    assert min_runner_count(F(3, 10)) == 16


def test_min_runner_count_matches_exact_threshold_beyond_exact_limit(monkeypatch):
    """Test that the bracketed search agrees with exact summation."""
    from src.core.config import settings

    monkeypatch.setattr(settings, "exact_harmonic_limit", 4)
    a = F(1, 4)
    k = min_runner_count(a)
    assert harmonic(k) >= 1 / a > harmonic(k - 1)
    assert k == 31


def test_min_runner_count_rejects_bad_input():
    with pytest.raises(InvalidParameterError):
        min_runner_count(F(0))
    with pytest.raises(InvalidParameterError):
        min_runner_count(F(3, 2))
    with pytest.raises(InfeasibleScaleError):
        min_runner_count(F(1, 1000))


def test_infeasible_shade_reports_log_scale():
    with pytest.raises(InfeasibleScaleError) as info:
        build_no_shade(Arc(F(1, 1000), F(999, 1000)))
    assert "exp(1000)" in info.value.detail
    assert info.value.log_required > 999
    estimate = runner_count_estimate(F(1, 1000))
    assert not estimate.feasible
    assert estimate.describe() == "k ≈ exp(1000)"


def test_half_shade_construction(half_shade_construction):
    """Test the reference construction for a shade of length 1/2."""
    c = half_shade_construction
    assert c.k == 4
    assert [r.speed for r in c.schedule.runners] == [SpeedValue.of(i) for i in range(1, 5)]
    assert [r.start for r in c.schedule.runners] == [F(0), F(0), F(3, 4), F(1, 3)]
    assert c.exit_times[1:] == [F(1, 2), F(3, 4), F(11, 12), F(25, 24)]
    assert c.metadata()["exit_times"] == [F(1, 2), F(3, 4), F(11, 12), F(25, 24)]


def test_half_shade_construction_verifies(half_shade_construction, half_shade):
    verdict = verify_no_shade(half_shade_construction.schedule, half_shade)
    assert verdict.holds
    assert verdict.witness is None


def test_dropping_the_last_runner_gives_an_exact_witness(half_shade_construction, half_shade):
    schedule = half_shade_construction.schedule.without(3)
    verdict = verify_no_shade(schedule, half_shade)
    assert not verdict.holds
    assert F(11, 12) < verdict.witness < 1
    for runner in schedule.runners:
        assert in_arc(position(runner, verdict.witness), half_shade)


def test_construction_with_larger_k_still_verifies(half_shade):
    c = build_no_shade(half_shade, k=6)
    assert c.k == 6
    assert verify_no_shade(c.schedule, half_shade).holds


def test_k_below_the_threshold_is_rejected(half_shade):
    with pytest.raises(InvalidParameterError) as info:
        build_no_shade(half_shade, k=3)
    assert "below the threshold" in info.value.detail
    with pytest.raises(InvalidParameterError):
        build_no_shade(half_shade, k=0)


def test_full_shade_is_rejected():
    with pytest.raises(InvalidParameterError):
        build_no_shade(Arc(F(0), F(1)))


def test_seventy_percent_shade_needs_sixteen_runners():
    shade = Arc(F(3, 10), F(7, 10))
    c = build_no_shade(shade)
    assert c.k == 16
    assert verify_no_shade(c.schedule, shade).holds


def test_rotated_shade_construction_verifies():
    shade = Arc(F(1, 7), F(1, 3))
    c = build_no_shade(shade)
    assert verify_no_shade(c.schedule, shade).holds
    assert not verify_no_shade(c.schedule.without(c.k - 1), shade).holds


def test_verify_edge_cases(half_shade):
    empty = RunnerSchedule.from_values([])
    verdict = verify_no_shade(empty, half_shade)
    assert not verdict.holds and verdict.witness == 0
    full = verify_no_shade(RunnerSchedule.from_values([1]), Arc(F(0), F(1)))
    assert not full.holds
    irrational = RunnerSchedule(UNIT_CIRCLE, (Runner(SpeedValue(F(1), 2)),))
    with pytest.raises(IrrationalSpeedError):
        verify_no_shade(irrational, half_shade)


def test_rendezvous_speeds():
    assert build_rendezvous_speeds(1, F(1, 2)) == [SpeedValue.of(1)]
    assert build_rendezvous_speeds(4, F(1, 2)) == [SpeedValue.of(v) for v in (1, 16, 128, 512)]
    with pytest.raises(InvalidParameterError):
        build_rendezvous_speeds(0, F(1, 2))
    with pytest.raises(InvalidParameterError):
        build_rendezvous_speeds(2, F(1))


def test_rendezvous_set_for_two_runners():
    """Test the exact meeting set of speeds 1 and 4 in the arc [0, 1/2]."""
    schedule = RunnerSchedule.from_values([1, 4])
    arc = Arc(F(0), F(1, 2))
    meeting = rendezvous_set(schedule, arc)
    assert meeting.contains(F(0)) and meeting.contains(F(1, 8))
    assert meeting.contains(F(1, 4)) and meeting.contains(F(3, 8))
    assert meeting.contains(F(1, 2))
    assert not meeting.contains(F(3, 16))
    assert find_rendezvous_time(schedule, arc, F(1, 5)) == F(1, 4)


def test_find_rendezvous_time_is_strictly_after_t():
    schedule = RunnerSchedule.from_values([1, 4])
    arc = Arc(F(0), F(1, 2))
    t = find_rendezvous_time(schedule, arc, F(0))
    assert t == F(1, 16)
    with pytest.raises(InvalidParameterError):
        find_rendezvous_time(schedule, arc, F(-1))


def test_rendezvous_for_random_starts(rng):
    """Every random start vector admits a meeting after T."""
    arc = Arc(F(0), F(1, 2))
    for _ in range(100):
        starts = [random_rational(rng) for _ in range(4)]
        schedule = rendezvous_schedule(4, F(1, 2), starts)
        for T in (F(0), F(10), F(1000)):
            t = find_rendezvous_time(schedule, arc, T)
            assert t is not None and t > T
            assert all(in_arc(position(r, t), arc) for r in schedule.runners)


def test_inductive_oracle_lands_in_the_exact_meeting_set(rng):
    arc = Arc(F(0), F(1, 2))
    for _ in range(20):
        starts = [random_rational(rng) for _ in range(3)]
        schedule = rendezvous_schedule(3, F(1, 2), starts)
        T = random_rational(rng, 13, 20)
        t = inductive_rendezvous_time(schedule, arc, T)
        assert t is not None and t > T
        assert all(in_arc(position(r, t), arc) for r in schedule.runners)
        assert rendezvous_set(schedule, arc).contains(t)


def test_open_boundary_is_the_dual_of_no_shade(half_shade_construction, half_shade):
    """Test that with open arcs the construction never gathers in its shade."""
    schedule = half_shade_construction.schedule
    assert find_rendezvous_time(schedule, half_shade, F(0), boundary=OPEN) is None
    assert is_empty(rendezvous_set(schedule, half_shade, boundary=OPEN))
    # closed arcs meet at a hand-over instant
    assert find_rendezvous_time(schedule, half_shade, F(0)) == F(11, 12)
    weakened = schedule.without(3)
    t = find_rendezvous_time(weakened, half_shade, F(0), boundary=OPEN)
    assert t is not None
    assert all(in_arc(position(r, t), half_shade) for r in weakened.runners)


def test_rendezvous_rejects_unknown_boundary():
    schedule = RunnerSchedule.from_values([1])
    with pytest.raises(InvalidParameterError):
        rendezvous_set(schedule, Arc(F(0), F(1, 2)), boundary="half-open")


SHADE_GRID = sorted({F(p, q) for q in range(2, 11) for p in range(1, q) if F(1, 10) <= F(p, q) <= F(3, 4)})


@pytest.mark.parametrize("shade_length", SHADE_GRID, ids=str)
def test_constructions_verify_across_shade_lengths(shade_length):
    shade = Arc(1 - shade_length, shade_length)
    c = build_no_shade(shade)
    assert verify_no_shade(c.schedule, shade).holds


@pytest.mark.parametrize("shade", [Arc(F(1, 2), F(1, 2)), Arc(F(3, 10), F(7, 10)), Arc(F(1, 7), F(1, 3))])
def test_each_runner_guards_its_own_hand_over_window(shade):
    """Runner i sits in the complement exactly during [a*H_{i-1}, a*H_i]."""
    c = build_no_shade(shade)
    outside = shade.complement(UNIT_CIRCLE)
    harmonics = partial_harmonics(c.k)
    for i, runner in enumerate(c.schedule.runners, start=1):
        occupied = occupancy(runner, outside)
        enter, leave = c.a * harmonics[i - 1], c.a * harmonics[i]
        assert leave - enter == c.a / i
        assert occupied.contains(enter) and occupied.contains(leave)
        assert occupied.contains((enter + leave) / 2)
        slack = (1 - c.a) / (2 * i)
        assert not occupied.contains(leave + slack)
        if enter >= slack:
            assert not occupied.contains(enter - slack)


def test_no_shade_is_the_negation_of_an_open_rendezvous(rng):
    """Test on random schedules that verification holds exactly when no strict meeting exists."""
    pool = [F(1), F(3, 2), F(2), F(5, 2), F(3), F(4), F(5)]
    outcomes = set()
    for _ in range(100):
        speeds = rng.sample(pool, rng.randrange(1, 5))
        starts = [random_rational(rng, 12) for _ in speeds]
        schedule = RunnerSchedule.from_values(speeds, starts)
        shade = Arc(random_rational(rng, 12), F(rng.randrange(1, 12), 12))
        holds = verify_no_shade(schedule, shade).holds
        meeting = find_rendezvous_time(schedule, shade, F(0), boundary=OPEN)
        assert holds == (meeting is None)
        outcomes.add(holds)
    assert outcomes == {True, False}


@pytest.mark.parametrize("a", [F(1, 2), F(1, 3), F(2, 5), F(3, 4)])
def test_rendezvous_speeds_follow_the_recursion(a):
    for k in range(2, 7):
        speeds = build_rendezvous_speeds(k, a)
        assert speeds[:-1] == build_rendezvous_speeds(k - 1, a / 2)
        assert speeds[-1].as_rational() / speeds[-2].as_rational() == 2 / a
        values = [v.as_rational() for v in speeds]
        assert values == sorted(set(values))
