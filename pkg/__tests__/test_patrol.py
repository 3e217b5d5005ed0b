"""
Tests for idle-time evaluation of patrol schedules.
"""

from fractions import Fraction

import pytest

from conftest import random_rational
from src.core.models import Circle, RunnerSchedule
from src.exceptions import InvalidParameterError
from src.services.patrol import (
    ESTIMATE,
    EXACT,
    PatrolAgent,
    PatrolSchedule,
    Segment,
    Trajectory,
    idle_time,
    idle_time_estimate,
    idle_time_exact,
    schedule_to_patrol,
)

F = Fraction


def _zigzag(length=F(1), speed=F(1)):
    """One agent walking a segment end to end and back."""
    lap = length / speed
    trajectory = Trajectory(2 * lap, ((F(0), F(0)), (lap, length), (2 * lap, F(0))))
    return PatrolSchedule(Segment(length), (PatrolAgent(speed, trajectory),))


def _random_runners(rng):
    count = rng.randrange(1, 4)
    speeds = [F(rng.randrange(1, 5), rng.randrange(1, 3)) for _ in range(count)]
    starts = [random_rational(rng, 12) for _ in range(count)]
    return RunnerSchedule.from_values(speeds, starts, distinct_speeds=False)


def test_single_unit_runner_has_idle_one():
    report = idle_time_exact(RunnerSchedule.from_values([1]))
    assert report.mode == EXACT
    assert report.idle == 1
    assert report.report()["idle"] == "1/1"


def test_antipodal_pair_halves_the_idle_time():
    schedule = RunnerSchedule.from_values([1, 1], [0, F(1, 2)], distinct_speeds=False)
    assert idle_time(schedule).idle == F(1, 2)


def test_speeds_one_and_two_from_a_common_start():
    report = idle_time(RunnerSchedule.from_values([1, 2]))
    assert report.idle == F(1, 2)
    gap_start, gap_end = report.witness_gap
    assert gap_end - gap_start == F(1, 2)


def test_circle_length_scales_idle_time():
    schedule = RunnerSchedule.from_values([2], circle=Circle(F(3)))
    assert idle_time_exact(schedule).idle == F(3, 2)


def test_no_runners_is_unbounded():
    report = idle_time_exact(RunnerSchedule.from_values([]))
    assert report.unbounded
    assert report.idle is None
    assert report.report()["idle"] == "inf"


def test_zigzag_bounds_contain_twice_the_crossing_time():
    for length, speed in ((F(1), F(1)), (F(3, 2), F(1, 2))):
        report = idle_time_estimate(_zigzag(length, speed), F(1, 20))
        expected = 2 * length / speed
        assert report.mode == ESTIMATE
        assert report.lower <= expected <= report.upper
        body = report.report()
        assert "lower" in body and "upper" in body and "idle" not in body


def test_point_never_visited_is_unbounded():
    trajectory = Trajectory(F(2), ((F(0), F(0)), (F(1), F(1, 2)), (F(2), F(0))))
    schedule = PatrolSchedule(Segment(F(1)), (PatrolAgent(F(1), trajectory),))
    report = idle_time_estimate(schedule, F(1, 4))
    assert report.unbounded
    assert report.witness_point == F(3, 4)


def test_estimate_brackets_exact_value_on_random_schedules(rng):
    """Test that sampled bounds contain the exact idle time and tighten as the grid halves."""
    for _ in range(50):
        schedule = _random_runners(rng)
        exact = idle_time_exact(schedule).idle
        patrol = schedule_to_patrol(schedule)
        coarse = idle_time_estimate(patrol, F(1, 8))
        fine = idle_time_estimate(patrol, F(1, 16))
        assert coarse.lower <= exact <= coarse.upper
        assert fine.lower <= exact <= fine.upper
        assert fine.upper - fine.lower == (coarse.upper - coarse.lower) / 2
        assert fine.lower >= coarse.lower


def test_idle_time_dispatch():
    schedule = RunnerSchedule.from_values([1])
    assert idle_time(schedule).mode == EXACT
    assert idle_time(schedule, F(1, 10)).mode == ESTIMATE
    with pytest.raises(InvalidParameterError):
        idle_time(_zigzag())
    with pytest.raises(InvalidParameterError):
        idle_time_estimate(_zigzag(), F(0))


def test_trajectory_validation():
    with pytest.raises(InvalidParameterError):
        Trajectory(F(1), ((F(0), F(0)),))
    with pytest.raises(InvalidParameterError):
        Trajectory(F(1), ((F(0), F(0)), (F(1, 2), F(0))))
    with pytest.raises(InvalidParameterError):
        Trajectory(F(1), ((F(0), F(0)), (F(1, 2), F(0)), (F(1, 2), F(0)), (F(1), F(0))))


def test_patrol_schedule_validation():
    fast = Trajectory(F(1), ((F(0), F(0)), (F(1, 2), F(1)), (F(1), F(0))))
    with pytest.raises(InvalidParameterError):
        PatrolSchedule(Segment(F(1)), (PatrolAgent(F(1), fast),))
    open_ended = Trajectory(F(1), ((F(0), F(0)), (F(1), F(1, 2))))
    with pytest.raises(InvalidParameterError):
        PatrolSchedule(Segment(F(1)), (PatrolAgent(F(1), open_ended),))
    with pytest.raises(InvalidParameterError):
        PatrolSchedule(Circle(F(1)), (PatrolAgent(F(1), open_ended),))
    outside = Trajectory(F(4), ((F(0), F(0)), (F(2), F(2)), (F(4), F(0))))
    with pytest.raises(InvalidParameterError):
        PatrolSchedule(Segment(F(1)), (PatrolAgent(F(1), outside),))
    with pytest.raises(InvalidParameterError):
        PatrolSchedule(Segment(F(1)), ())


def test_schedule_to_patrol_keeps_laps():
    schedule = RunnerSchedule.from_values([F(1, 2), 3], [F(1, 4), 0])
    patrol = schedule_to_patrol(schedule)
    assert [agent.trajectory.period for agent in patrol.agents] == [F(2), F(1, 3)]
    assert patrol.period == F(2)


def test_estimate_uses_actual_speed_not_the_cap():
    """Test that a loose speed cap does not tighten the bounds past the true idle time."""
    schedule = RunnerSchedule.from_values([1, F(3, 2), F(4, 3)], [F(14, 97), F(27, 97), F(10, 97)])
    exact = idle_time_exact(schedule).idle
    runners = schedule_to_patrol(schedule)
    patrol = PatrolSchedule(
        runners.fence, tuple(PatrolAgent(F(1000), agent.trajectory) for agent in runners.agents)
    )
    report = idle_time_estimate(patrol, F(1, 7))
    assert report.lower <= exact <= report.upper
    assert report.upper - report.lower == 2 * F(1, 7)


def test_stops_at_sample_points_widen_the_bounds():
    """One agent standing 2 time units at each grid point; points between them wait 5."""
    trajectory = Trajectory(
        F(5), ((F(0), F(0)), (F(2), F(0)), (F(5, 2), F(1, 2)), (F(9, 2), F(1, 2)), (F(5), F(1)))
    )
    assert trajectory.min_moving_slope() == 1
    assert trajectory.max_dwell() == 2
    schedule = PatrolSchedule(Circle(F(1)), (PatrolAgent(F(1), trajectory),))
    coarse = idle_time_estimate(schedule, F(1, 2))
    fine = idle_time_estimate(schedule, F(1, 4))
    assert coarse.lower == 3
    assert fine.lower == 5
    assert coarse.lower <= fine.lower <= coarse.upper


def test_agents_that_never_move_leave_points_unvisited():
    still = Trajectory(F(1), ((F(0), F(1, 4)), (F(1), F(1, 4))))
    assert still.min_moving_slope() is None
    schedule = PatrolSchedule(Circle(F(1)), (PatrolAgent(F(1), still),))
    report = idle_time_estimate(schedule, F(1, 4))
    assert report.unbounded
    assert report.witness_point == F(5, 8)


def test_exact_idle_ignores_rotation_and_labels(rng):
    for _ in range(30):
        schedule = _random_runners(rng)
        idle = idle_time_exact(schedule).idle
        offset = random_rational(rng, 12)
        assert idle_time_exact(schedule.rotated(offset)).idle == idle
        shuffled = list(schedule.runners)
        rng.shuffle(shuffled)
        relabeled = RunnerSchedule(schedule.circle, tuple(shuffled), distinct_speeds=False)
        assert idle_time_exact(relabeled).idle == idle


def test_exact_idle_scales_inversely_with_speed(rng):
    for _ in range(30):
        schedule = _random_runners(rng)
        c = F(rng.randrange(1, 6), rng.randrange(1, 4))
        faster = RunnerSchedule.from_values(
            [runner.speed.as_rational() * c for runner in schedule.runners],
            [runner.start for runner in schedule.runners],
            distinct_speeds=False,
        )
        assert idle_time_exact(faster).idle == idle_time_exact(schedule).idle / c
