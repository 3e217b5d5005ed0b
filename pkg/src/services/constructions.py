"""
Builders and verifiers for the two circle constructions:

* never all in the shade: speeds 1..k, runner i entering the complementary arc
  [0, a] exactly when runner i-1 leaves it, at t_i = a * H_i;
* all in the arc: speeds grown by the factor 2/a per runner, with the arc halved
  for the runners before, so that every runner can meet in the arc after any T.

Both place the relevant arc at [0, .] internally and rotate results back.
"""

import logging
import math
from concurrent.futures import Executor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence

import mpmath

from src.core.config import settings
from src.core.harmonic import harmonic, harmonic_bounds, partial_harmonics
from src.core.models import (
    Arc,
    Runner,
    RunnerSchedule,
    SpeedValue,
    UNIT_CIRCLE,
    in_arc,
    position,
)
from src.core.rational import format_compact, frac_mod, to_rational
from src.exceptions import InfeasibleScaleError, InvalidParameterError, IrrationalSpeedError
from src.services.interval_algebra import (
    PeriodicIntervalSet,
    complement,
    covers_period,
    first_interior_point_after,
    first_point_after,
    intersect_all,
    is_empty,
    occupancy,
    union_all,
)

logger = logging.getLogger(__name__)

CLOSED = "closed"
OPEN = "open"


@dataclass(frozen=True)
class NoShadeConstruction:
    """Runner i has speed i and leaves the complement [0, a] at exit_times[i]."""
    schedule: RunnerSchedule
    shade_arc: Arc
    a: Fraction
    k: int
    exit_times: List[Fraction] = field(default_factory=list)

    @property
    def period(self) -> Fraction:
        return Fraction(1)

    def metadata(self) -> dict:
        return {"kind": "no-shade", "a": self.a, "k": self.k, "exit_times": list(self.exit_times[1:])}


@dataclass(frozen=True)
class Verdict:
    """``holds`` False always comes with an exact witness time."""
    holds: bool
    witness: Optional[Fraction] = None
    covered: Optional[PeriodicIntervalSet] = None


@dataclass(frozen=True)
class RunnerCountEstimate:
    """Size of the smallest no-shade team, on a log scale when it is huge."""
    a: Fraction
    log_k: mpmath.mpf
    sufficient_log_k: Fraction
    feasible: bool

    def describe(self) -> str:
        return f"k ≈ exp({format_compact(self.sufficient_log_k)})"


def runner_count_estimate(a: Fraction) -> RunnerCountEstimate:
    """
    ln of the required team size: H_k >= 1/a needs ln k ≈ 1/a - gamma, and
    k >= exp(1/a) always suffices.
    """
    a = _check_a(a, allow_one=True)
    with mpmath.workdps(30):
        log_k = mpmath.mpf(a.denominator) / a.numerator - mpmath.euler
    feasible = log_k <= mpmath.log(settings.max_runners)
    return RunnerCountEstimate(a, log_k, 1 / a, bool(feasible))


def _check_a(a, allow_one: bool) -> Fraction:
    a = to_rational(a)
    upper_ok = a <= 1 if allow_one else a < 1
    if not (a > 0 and upper_ok):
        interval = "(0, 1]" if allow_one else "(0, 1)"
        raise InvalidParameterError(f"a must lie in {interval}, got {format_compact(a)}")
    return a


def _meets(k: int, target: Fraction) -> bool:
    """H_k >= target, decided exactly for small k and by certified bounds otherwise."""
    if k <= settings.exact_harmonic_limit:
        return harmonic(k) >= target
    target_mp = mpmath.mpf(target.numerator) / target.denominator
    lower, upper = harmonic_bounds(k)
    if lower >= target_mp:
        return True
    if upper < target_mp:
        return False
    # ties closer than the bracket: settle by exact summation
    logger.debug(f"H_{k} too close to {target} for the bracket; summing exactly")
    return harmonic(k) >= target


def min_runner_count(a: Fraction, cap: Optional[int] = None) -> int:
    """
    Smallest k with a * H_k >= 1, i.e. H_k >= 1/a.

    Raises:
        InvalidParameterError: If a is outside (0, 1]
        InfeasibleScaleError: If k would exceed ``cap`` (default MAX_RUNNERS)
    """
    a = _check_a(a, allow_one=True)
    cap = cap if cap is not None else settings.max_runners
    target = 1 / a
    estimate = runner_count_estimate(a)
    if estimate.log_k > mpmath.log(cap) + 1:
        raise InfeasibleScaleError(
            f"infeasible {estimate.describe()} exceeds the cap of {cap} runners",
            log_required=float(estimate.log_k),
        )
    if estimate.log_k < math.log(settings.exact_harmonic_limit):
        total, k = Fraction(0), 0
        while total < target:
            k += 1
            if k > cap:
                raise InfeasibleScaleError(
                    f"infeasible {estimate.describe()} exceeds the cap of {cap} runners",
                    log_required=float(estimate.log_k),
                )
            total += Fraction(1, k)
        return k
    # H_k is increasing: bracket around exp(1/a - gamma), then bisect
    guess = int(mpmath.floor(mpmath.exp(estimate.log_k)))
    lo, hi = max(1, guess // 2), max(2, guess * 2)
    while not _meets(hi, target):
        lo, hi = hi, hi * 2
    while _meets(lo, target) and lo > 1:
        lo //= 2
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _meets(mid, target):
            hi = mid
        else:
            lo = mid
    if hi > cap:
        raise InfeasibleScaleError(
            f"infeasible {estimate.describe()} exceeds the cap of {cap} runners",
            log_required=float(estimate.log_k),
        )
    return hi


def build_no_shade(shade_arc: Arc, k: Optional[int] = None) -> NoShadeConstruction:
    """
    Speeds 1..k on the unit circle with f_i(t) = i t - i a H_{i-1} in rotated
    coordinates, so that some runner is outside ``shade_arc`` at every t >= 0.

    Raises:
        InvalidParameterError: If the shade covers the circle or k is too small
        InfeasibleScaleError: If the required k is beyond the cap
    """
    circle = UNIT_CIRCLE
    shade_arc.validate_on(circle)
    if shade_arc.is_full(circle):
        raise InvalidParameterError("shade length must be < 1")
    a = 1 - shade_arc.arc_length
    target = 1 / a
    if k is None:
        k = min_runner_count(a)
    else:
        if k < 1:
            raise InvalidParameterError(f"k must be a positive integer, got {k}")
        if k > settings.max_runners:
            raise InfeasibleScaleError(f"k = {k} exceeds the cap of {settings.max_runners} runners")
        if harmonic(k) < target:
            raise InvalidParameterError(
                f"k = {k} is below the threshold: H_{k} < 1/a = {format_compact(target)}"
            )
    # complement [c, c + a] is rotated to [0, a]
    offset = circle.wrap(shade_arc.end)
    harmonics = partial_harmonics(k)
    runners = tuple(
        Runner(SpeedValue.of(i), circle.wrap(offset - i * a * harmonics[i - 1]))
        for i in range(1, k + 1)
    )
    exit_times = [a * h for h in harmonics]
    logger.info(f"Built no-shade construction: a={a}, k={k}")
    return NoShadeConstruction(RunnerSchedule(circle, runners), shade_arc, a, k, exit_times)


def _require_rational(schedule: RunnerSchedule) -> None:
    if not schedule.is_rational:
        raise IrrationalSpeedError("exact interval reasoning needs rational speeds")


def verify_no_shade(schedule: RunnerSchedule, shade_arc: Arc,
                    executor: Optional[Executor] = None) -> Verdict:
    """
    Check that at every time some runner is in the closed complement of
    ``shade_arc``; on failure return a time at which every runner is in the shade.
    """
    _require_rational(schedule)
    circle = schedule.circle
    shade_arc.validate_on(circle)
    if shade_arc.is_full(circle) or not schedule.runners:
        return Verdict(False, Fraction(0))
    outside = shade_arc.complement(circle)
    sets = [occupancy(r, outside, circle) for r in schedule.runners]
    covered = union_all(sets, executor)
    if covers_period(covered):
        return Verdict(True, None, covered)
    lo, hi = covered.open_gaps()[0]
    witness = frac_mod((lo + hi) / 2, covered.period)
    if not all(in_arc(position(r, witness, circle), shade_arc, circle) for r in schedule.runners):
        raise AssertionError(f"witness {witness} failed direct evaluation")
    logger.info(f"No-shade property fails; all runners in the shade at t={witness}")
    return Verdict(False, witness, covered)


def build_rendezvous_speeds(k: int, a: Fraction) -> List[SpeedValue]:
    """
    speeds(1, a) = [1]; speeds(k, a) = speeds(k-1, a/2) + [(2/a) * last].

    Raises:
        InvalidParameterError: If k < 1 or a is outside (0, 1)
    """
    a = _check_a(a, allow_one=False)
    if not isinstance(k, int) or k < 1:
        raise InvalidParameterError(f"k must be a positive integer, got {k!r}")
    # unrolled: runner j (1-based, j >= 2) sees the arc a / 2^(k-j)
    speeds = [Fraction(1)]
    for j in range(2, k + 1):
        arc_j = a / 2 ** (k - j)
        speeds.append(2 / arc_j * speeds[-1])
    return [SpeedValue.of(v) for v in speeds]


def rendezvous_set(schedule: RunnerSchedule, arc: Arc, boundary: str = CLOSED,
                   executor: Optional[Executor] = None) -> PeriodicIntervalSet:
    """
    Times at which every runner is inside ``arc``.

    With ``boundary="open"`` the result is the closure of the times every runner
    is strictly inside, computed as the complement of the closed-complement
    coverage; this is the exact negation of ``verify_no_shade``.
    """
    _require_rational(schedule)
    circle = schedule.circle
    arc.validate_on(circle)
    if boundary not in (CLOSED, OPEN):
        raise InvalidParameterError(f"boundary must be '{CLOSED}' or '{OPEN}', got {boundary!r}")
    if not schedule.runners or (boundary == OPEN and arc.is_full(circle)):
        return PeriodicIntervalSet.full(circle.length)
    if boundary == OPEN:
        outside = arc.complement(circle)
        return complement(union_all([occupancy(r, outside, circle) for r in schedule.runners], executor))
    return intersect_all([occupancy(r, arc, circle) for r in schedule.runners], executor)


def find_rendezvous_time(schedule: RunnerSchedule, arc: Arc, T: Fraction, boundary: str = CLOSED,
                         executor: Optional[Executor] = None) -> Optional[Fraction]:
    """
    A time t > T with every runner in ``arc``, or None when there is none.

    Closed arcs admit meetings at single instants, e.g. the hand-over instants of
    a no-shade construction where one runner sits on each endpoint of the shade:
    for the shade [1/2, 1] built by ``build_no_shade`` this returns 11/12.
    Pass ``boundary="open"`` to ask whether the runners ever meet strictly
    inside the arc; a verified construction then returns None.
    """
    T = to_rational(T)
    if T < 0:
        raise InvalidParameterError(f"T must be >= 0, got {T}")
    meeting = rendezvous_set(schedule, arc, boundary, executor)
    if is_empty(meeting):
        logger.info("Rendezvous set is empty")
        return None
    if boundary == OPEN:
        return first_interior_point_after(meeting, T)
    return first_point_after(meeting, T)


def inductive_rendezvous_time(schedule: RunnerSchedule, arc: Arc, T: Fraction) -> Optional[Fraction]:
    """
    Time-finding that follows the induction: meet runners 1..k-1 in the first
    half of the arc after T, then runner k (the fastest, at least (2/a) times
    runner k-1) enters the arc within 1/v_k, before anyone leaves.

    Only meaningful for schedules built by ``build_rendezvous_speeds``; returns
    None when the induction step does not apply.
    """
    _require_rational(schedule)
    circle = schedule.circle
    T = to_rational(T)
    runners = list(schedule.runners)
    if len(runners) == 1:
        return first_point_after(occupancy(runners[0], arc, circle), T)
    half = Arc(arc.start, arc.arc_length / 2)
    earlier = RunnerSchedule(circle, tuple(runners[:-1]), schedule.distinct_speeds)
    t = inductive_rendezvous_time(earlier, half, T)
    if t is None:
        return None
    last = runners[-1]
    v = last.speed.as_rational()
    entry = t + circle.wrap(arc.start - position(last, t, circle)) / v
    if entry - t > circle.length / v:
        return None
    if all(in_arc(position(r, entry, circle), arc, circle) for r in runners):
        return entry
    return None


def rendezvous_schedule(k: int, a: Fraction, starts: Optional[Sequence[Fraction]] = None) -> RunnerSchedule:
    """Unit-circle schedule with ``build_rendezvous_speeds(k, a)`` and given starts."""
    speeds = build_rendezvous_speeds(k, a)
    starts = list(starts) if starts is not None else [Fraction(0)] * k
    if len(starts) != k:
        raise InvalidParameterError(f"expected {k} start positions, got {len(starts)}")
    return RunnerSchedule(UNIT_CIRCLE, tuple(Runner(v, to_rational(b)) for v, b in zip(speeds, starts)))
