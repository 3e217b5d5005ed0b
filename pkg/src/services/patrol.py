"""
Idle time of patrolling schedules: the longest time some fence point stays
unvisited, maximized over all points.

Constant-speed clockwise runners get an exact answer. General periodic
piecewise-linear schedules, on a circle or a segment, get certified bounds from
a grid of sample points.
"""

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Tuple, Union

from src.core.models import Circle, RunnerSchedule
from src.core.rational import format_rational, frac_mod, rational_gcd, rational_lcm, to_rational
from src.exceptions import InvalidParameterError

logger = logging.getLogger(__name__)

EXACT = "exact"
ESTIMATE = "estimate"


@dataclass(frozen=True)
class Segment:
    """Open fence [0, length]; its endpoints are distinct points."""
    length: Fraction

    def __post_init__(self):
        length = to_rational(self.length)
        object.__setattr__(self, "length", length)
        if length <= 0:
            raise InvalidParameterError(f"segment length must be positive, got {length}")


Fence = Union[Circle, Segment]


@dataclass(frozen=True)
class Trajectory:
    """Periodic piecewise-linear motion given by breakpoints (t_j, x_j) over one period."""
    period: Fraction
    breakpoints: Tuple[Tuple[Fraction, Fraction], ...]

    def __post_init__(self):
        period = to_rational(self.period)
        points = tuple((to_rational(t), to_rational(x)) for t, x in self.breakpoints)
        object.__setattr__(self, "period", period)
        object.__setattr__(self, "breakpoints", points)
        if period <= 0:
            raise InvalidParameterError(f"trajectory period must be positive, got {period}")
        if len(points) < 2:
            raise InvalidParameterError("a trajectory needs at least two breakpoints")
        if points[0][0] != 0 or points[-1][0] != period:
            raise InvalidParameterError("breakpoints must run from t=0 to t=period")
        for (t0, _), (t1, _) in zip(points, points[1:]):
            if t1 <= t0:
                raise InvalidParameterError(f"breakpoint times must increase, got {t0} then {t1}")

    def segments(self):
        return zip(self.breakpoints, self.breakpoints[1:])

    def max_slope(self) -> Fraction:
        return max(abs(x1 - x0) / (t1 - t0) for (t0, x0), (t1, x1) in self.segments())

    def min_moving_slope(self) -> Optional[Fraction]:
        """Slowest actual speed over the moving segments; None for a stationary agent."""
        slopes = [abs(x1 - x0) / (t1 - t0) for (t0, x0), (t1, x1) in self.segments() if x1 != x0]
        return min(slopes) if slopes else None

    def max_dwell(self) -> Fraction:
        """Longest single stretch spent standing still."""
        return max((t1 - t0 for (t0, x0), (t1, x1) in self.segments() if x1 == x0), default=Fraction(0))


@dataclass(frozen=True)
class PatrolAgent:
    max_speed: Fraction
    trajectory: Trajectory

    def __post_init__(self):
        speed = to_rational(self.max_speed)
        object.__setattr__(self, "max_speed", speed)
        if speed <= 0:
            raise InvalidParameterError(f"maximum speed must be positive, got {speed}")


@dataclass(frozen=True)
class PatrolSchedule:
    fence: Fence
    agents: Tuple[PatrolAgent, ...]

    def __post_init__(self):
        agents = tuple(self.agents)
        object.__setattr__(self, "agents", agents)
        if not agents:
            raise InvalidParameterError("a patrol schedule needs at least one agent")
        for index, agent in enumerate(agents, start=1):
            trajectory = agent.trajectory
            first, last = trajectory.breakpoints[0][1], trajectory.breakpoints[-1][1]
            if isinstance(self.fence, Circle):
                if frac_mod(last - first, self.fence.length) != 0:
                    raise InvalidParameterError(f"agent {index}: trajectory does not close up modulo the circle")
            else:
                if last != first:
                    raise InvalidParameterError(f"agent {index}: trajectory does not close up")
                if any(x < 0 or x > self.fence.length for _, x in trajectory.breakpoints):
                    raise InvalidParameterError(f"agent {index}: trajectory leaves the segment")
            if trajectory.max_slope() > agent.max_speed:
                raise InvalidParameterError(
                    f"agent {index}: slope {trajectory.max_slope()} exceeds max speed {agent.max_speed}"
                )

    @property
    def period(self) -> Fraction:
        return rational_lcm(agent.trajectory.period for agent in self.agents)


@dataclass(frozen=True)
class IdleReport:
    """
    Exact mode: ``idle`` is the idle time and ``witness_gap`` has that length.
    Estimate mode: lower <= idle <= upper. ``unbounded`` marks points never visited.
    """
    mode: str
    lower: Optional[Fraction]
    upper: Optional[Fraction]
    witness_point: Fraction
    witness_gap: Optional[Tuple[Fraction, Fraction]]
    unbounded: bool = False
    transient: Optional[Fraction] = None

    @property
    def idle(self) -> Optional[Fraction]:
        if self.mode == EXACT and not self.unbounded:
            return self.lower
        return None

    def report(self) -> dict:
        body = {"mode": self.mode, "witness_point": format_rational(self.witness_point)}
        if self.unbounded:
            body["idle"] = "inf"
            body["unbounded"] = True
            return body
        if self.mode == EXACT:
            body["idle"] = format_rational(self.lower)
        else:
            body["lower"] = format_rational(self.lower)
            body["upper"] = format_rational(self.upper)
        body["witness_gap"] = [format_rational(self.witness_gap[0]), format_rational(self.witness_gap[1])]
        if self.transient is not None:
            body["transient"] = format_rational(self.transient)
        return body


def _longest_gap(times: List[Fraction], period: Fraction) -> Tuple[Fraction, Fraction]:
    """Longest cyclic gap between sorted visit times within one period: (length, start)."""
    best = (times[0] + period - times[-1], times[-1])
    for before, after in zip(times, times[1:]):
        if after - before > best[0]:
            best = (after - before, before)
    return best


def _visit_times(schedule: RunnerSchedule, x: Fraction, period: Fraction) -> List[Fraction]:
    circle = schedule.circle
    times = []
    for runner in schedule.runners:
        v = runner.speed.as_rational()
        lap = circle.length / v
        first = circle.wrap(x - runner.start) / v
        times.extend(first + m * lap for m in range(int(period / lap)))
    times.sort()
    return times


def _event_points(schedule: RunnerSchedule) -> List[Fraction]:
    """Points x in [0, L) where visit times of two runners coincide."""
    circle = schedule.circle
    points = set()
    runners = schedule.runners
    for i in range(len(runners)):
        for j in range(i + 1, len(runners)):
            vi, vj = runners[i].speed.as_rational(), runners[j].speed.as_rational()
            drift = 1 / vi - 1 / vj
            if drift == 0:
                continue
            lattice = rational_gcd(circle.length / vi, circle.length / vj)
            offset = runners[i].start / vi - runners[j].start / vj
            # x * drift = offset + s * lattice for integers s
            ends = sorted((-offset / lattice, (circle.length * drift - offset) / lattice))
            for s in range(math.floor(ends[0]) - 1, math.ceil(ends[1]) + 2):
                x = (offset + s * lattice) / drift
                if 0 <= x < circle.length:
                    points.add(x)
    return sorted(points)


def idle_time_exact(schedule: RunnerSchedule) -> IdleReport:
    """
    Exact idle time of constant-speed clockwise runners in periodic steady state.

    Visit times of a point x form one arithmetic progression per runner; the
    longest gap is piecewise linear in x with breaks only where two runners'
    visit times meet, so it is maximized at such event points (or anywhere,
    when there are none). The gap before the first visit after t = 0 is also
    checked; it never exceeds the steady-state gap containing it.
    """
    circle = schedule.circle
    if not schedule.runners:
        return IdleReport(EXACT, None, None, Fraction(0), None, unbounded=True)
    speeds = [runner.speed.as_rational() for runner in schedule.runners]
    period = rational_lcm(circle.length / v for v in speeds)
    candidates = sorted({Fraction(0), *_event_points(schedule)})
    logger.debug(f"Idle time: period={period}, {len(candidates)} candidate points")
    best = None
    transient = Fraction(0)
    for x in candidates:
        times = _visit_times(schedule, x, period)
        gap, start = _longest_gap(times, period)
        transient = max(transient, times[0])
        if best is None or gap > best[0]:
            best = (gap, start, x)
    gap, start, x = best
    idle = max(gap, transient)
    return IdleReport(EXACT, idle, idle, x, (start, start + gap), transient=transient)


def schedule_to_patrol(schedule: RunnerSchedule) -> PatrolSchedule:
    """Constant-speed runners as piecewise-linear trajectories (one lap per period)."""
    circle = schedule.circle
    agents = []
    for runner in schedule.runners:
        v = runner.speed.as_rational()
        lap = circle.length / v
        trajectory = Trajectory(lap, ((Fraction(0), runner.start), (lap, runner.start + circle.length)))
        agents.append(PatrolAgent(v, trajectory))
    return PatrolSchedule(circle, tuple(agents))


def _crossings(agent: PatrolAgent, fence: Fence, x: Fraction, horizon: Fraction) -> List[Tuple[Fraction, Fraction]]:
    """Visit intervals [s, e] of point x by one agent on [0, horizon]."""
    trajectory = agent.trajectory
    visits = []
    for lap in range(int(horizon / trajectory.period)):
        shift = lap * trajectory.period
        for (t0, x0), (t1, x1) in trajectory.segments():
            if x0 == x1:
                if (frac_mod(x0 - x, fence.length) == 0) if isinstance(fence, Circle) else x0 == x:
                    visits.append((shift + t0, shift + t1))
                continue
            low, high = min(x0, x1), max(x0, x1)
            if isinstance(fence, Circle):
                targets = [
                    x + j * fence.length
                    for j in range(math.ceil((low - x) / fence.length), math.floor((high - x) / fence.length) + 1)
                ]
            else:
                targets = [x] if low <= x <= high else []
            for y in targets:
                t = t0 + (y - x0) / (x1 - x0) * (t1 - t0)
                visits.append((shift + t, shift + t))
    return visits


def _sample_gap(schedule: PatrolSchedule, x: Fraction, period: Fraction) -> Optional[Tuple[Fraction, Fraction, Fraction]]:
    """(longest gap starting in the first period, its start, wait for first visit), None if never visited."""
    horizon = 2 * period
    visits = []
    for agent in schedule.agents:
        visits.extend(_crossings(agent, schedule.fence, x, horizon))
    if not visits:
        return None
    visits.sort()
    merged = [list(visits[0])]
    for s, e in visits[1:]:
        if s <= merged[-1][1]:
            merged[-1][1] = max(merged[-1][1], e)
        else:
            merged.append([s, e])
    best = (Fraction(0), merged[0][1])
    for (_, end), (start, _) in zip(merged, merged[1:]):
        if end < period and start - end > best[0]:
            best = (start - end, end)
    return best[0], best[1], merged[0][0]


def _unvisited_point(schedule: PatrolSchedule) -> Fraction:
    """Midpoint of the widest stretch between the positions of stationary agents."""
    length = schedule.fence.length
    spots = {
        frac_mod(x, length) if isinstance(schedule.fence, Circle) else x
        for agent in schedule.agents
        for _, x in agent.trajectory.breakpoints
    }
    marks = sorted(spots | {Fraction(0), length})
    lo, hi = max(zip(marks, marks[1:]), key=lambda pair: pair[1] - pair[0])
    return (lo + hi) / 2


def _sample_points(fence: Fence, grid: Fraction) -> List[Fraction]:
    count = math.ceil(fence.length / grid)
    points = [k * grid for k in range(count)]
    if isinstance(fence, Segment):
        points.append(fence.length)
    return points


def idle_time_estimate(schedule: PatrolSchedule, grid: Fraction,
                       executor: Optional[Executor] = None) -> IdleReport:
    """
    Sample points every ``grid`` along the fence, compute each sample's exact
    longest unvisited gap over two periods, and bracket the idle time by
    [max_sample, max_sample + 2*grid/v_min + 2*dwell].

    ``v_min`` is the slowest speed an agent actually moves at, not its cap:
    moving a point by grid moves a pass-through visit by at most grid/v_min.
    A stop of length ``dwell`` at a sample covers that sample only, so it can
    hide up to ``dwell`` of a neighbour's gap.
    """
    grid = to_rational(grid)
    if grid <= 0:
        raise InvalidParameterError(f"grid spacing must be positive, got {grid}")
    slopes = [s for s in (agent.trajectory.min_moving_slope() for agent in schedule.agents) if s is not None]
    if not slopes:
        x = _unvisited_point(schedule)
        logger.info(f"No agent ever moves; point {x} is never visited")
        return IdleReport(ESTIMATE, None, None, x, None, unbounded=True)
    period = schedule.period
    points = _sample_points(schedule.fence, grid)
    logger.debug(f"Idle estimate: period={period}, {len(points)} samples")
    if executor is not None:
        results = list(executor.map(_sample_gap, [schedule] * len(points), points, [period] * len(points)))
    else:
        results = [_sample_gap(schedule, x, period) for x in points]
    best = None
    transient = Fraction(0)
    for x, result in zip(points, results):
        if result is None:
            logger.info(f"Point {x} is never visited; idle time is unbounded")
            return IdleReport(ESTIMATE, None, None, x, None, unbounded=True)
        gap, start, first = result
        transient = max(transient, first)
        if best is None or gap > best[0]:
            best = (gap, start, x)
    gap, start, x = best
    lower = max(gap, transient)
    dwell = max(agent.trajectory.max_dwell() for agent in schedule.agents)
    upper = lower + 2 * grid / min(slopes) + 2 * dwell
    return IdleReport(ESTIMATE, lower, upper, x, (start, start + gap), transient=transient)


def idle_time(schedule: Union[RunnerSchedule, PatrolSchedule], grid: Optional[Fraction] = None) -> IdleReport:
    """Exact for rational runner schedules without a grid, estimated otherwise."""
    if isinstance(schedule, RunnerSchedule):
        if grid is None:
            return idle_time_exact(schedule)
        schedule = schedule_to_patrol(schedule)
    if grid is None:
        raise InvalidParameterError("piecewise-linear schedules need a grid spacing")
    return idle_time_estimate(schedule, grid)

