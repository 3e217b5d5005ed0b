"""
Domain types shared by every service: circle, arcs, speeds, runners, schedules.

All of them are frozen dataclasses holding exact rationals, so they can be
shared freely between worker processes.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from src.core.rational import RationalLike, frac_mod, to_rational
from src.exceptions import InvalidParameterError, IrrationalSpeedError


def square_factor(n: int) -> Optional[int]:
    """Smallest p > 1 with p*p dividing n, or None when n is squarefree."""
    p = 2
    while p * p <= n:
        if n % (p * p) == 0:
            return p
        p += 1 if p == 2 else 2
    return None


@dataclass(frozen=True, order=False)
class SpeedValue:
    """A speed ``coefficient * sqrt(radicand)``; radicand 1 means rational."""
    coefficient: Fraction
    radicand: int = 1

    def __post_init__(self):
        coefficient = to_rational(self.coefficient)
        object.__setattr__(self, "coefficient", coefficient)
        if coefficient <= 0:
            raise InvalidParameterError(
                f"speed coefficient must be positive (runners move clockwise), got {coefficient}"
            )
        if not isinstance(self.radicand, int) or isinstance(self.radicand, bool) or self.radicand < 1:
            raise InvalidParameterError(f"radicand must be a positive integer, got {self.radicand!r}")
        factor = square_factor(self.radicand)
        if factor is not None:
            raise InvalidParameterError(
                f"radicand {self.radicand} is not squarefree: divisible by {factor}^2 = {factor * factor}"
            )

    @classmethod
    def of(cls, value: RationalLike) -> "SpeedValue":
        return cls(to_rational(value), 1)

    @property
    def is_rational(self) -> bool:
        return self.radicand == 1

    def as_rational(self) -> Fraction:
        if not self.is_rational:
            raise IrrationalSpeedError(
                f"speed {self} is irrational; use the certified evaluation path"
            )
        return self.coefficient

    def upper_bound(self) -> Fraction:
        """A rational >= the speed, tight to about 2^-32 relative."""
        if self.is_rational:
            return self.coefficient
        scale = 1 << 32
        root = math.isqrt(self.radicand * scale * scale) + 1
        return self.coefficient * Fraction(root, scale)

    def __str__(self) -> str:
        coefficient = self.coefficient
        text = str(coefficient.numerator) if coefficient.denominator == 1 else f"{coefficient.numerator}/{coefficient.denominator}"
        if self.is_rational:
            return text
        return f"{text}*sqrt({self.radicand})"


@dataclass(frozen=True)
class Circle:
    """A circle of length L parameterized by [0, L) with the endpoints identified."""
    length: Fraction = Fraction(1)

    def __post_init__(self):
        length = to_rational(self.length)
        object.__setattr__(self, "length", length)
        if length <= 0:
            raise InvalidParameterError(f"circle length must be positive, got {length}")

    def wrap(self, x: Fraction) -> Fraction:
        return frac_mod(x, self.length)


UNIT_CIRCLE = Circle(Fraction(1))


@dataclass(frozen=True)
class Arc:
    """Closed arc ``[start, start + arc_length] mod L``."""
    start: Fraction
    arc_length: Fraction

    def __post_init__(self):
        start = to_rational(self.start)
        arc_length = to_rational(self.arc_length)
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "arc_length", arc_length)
        if start < 0:
            raise InvalidParameterError(f"arc start must be >= 0, got {start}")
        if arc_length <= 0:
            raise InvalidParameterError(f"arc length must be positive, got {arc_length}")

    def validate_on(self, circle: Circle) -> "Arc":
        if self.start >= circle.length:
            raise InvalidParameterError(f"arc start {self.start} outside [0, {circle.length})")
        if self.arc_length > circle.length:
            raise InvalidParameterError(
                f"arc length {self.arc_length} exceeds circle length {circle.length}"
            )
        return self

    def is_full(self, circle: Circle) -> bool:
        return self.arc_length >= circle.length

    @property
    def end(self) -> Fraction:
        """Unwrapped end point; may exceed L."""
        return self.start + self.arc_length

    def complement(self, circle: Circle) -> "Arc":
        """Closure of the complementary arc."""
        if self.is_full(circle):
            raise InvalidParameterError("a full-circle arc has an empty complement")
        return Arc(circle.wrap(self.end), circle.length - self.arc_length)


@dataclass(frozen=True)
class Runner:
    """Runner moving clockwise at constant speed from ``start`` (beta)."""
    speed: SpeedValue
    start: Fraction = Fraction(0)

    def __post_init__(self):
        if not isinstance(self.speed, SpeedValue):
            object.__setattr__(self, "speed", SpeedValue.of(self.speed))
        start = to_rational(self.start)
        object.__setattr__(self, "start", start)
        if start < 0:
            raise InvalidParameterError(f"start position must be >= 0, got {start}")


@dataclass(frozen=True)
class RunnerSchedule:
    """
    A circle plus its runners.

    Speeds must be pairwise distinct unless ``distinct_speeds`` is False, which
    patrol evaluation uses for equal-speed teams.
    """
    circle: Circle
    runners: Tuple[Runner, ...] = field(default_factory=tuple)
    distinct_speeds: bool = True

    def __post_init__(self):
        runners = tuple(self.runners)
        object.__setattr__(self, "runners", runners)
        for index, runner in enumerate(runners):
            if runner.start >= self.circle.length:
                raise InvalidParameterError(
                    f"runner {index + 1}: start {runner.start} outside [0, {self.circle.length})"
                )
        if self.distinct_speeds:
            seen = {}
            for index, runner in enumerate(runners):
                if runner.speed in seen:
                    raise InvalidParameterError(
                        f"runners {seen[runner.speed] + 1} and {index + 1} share speed {runner.speed}"
                    )
                seen[runner.speed] = index

    @classmethod
    def from_values(cls, speeds: Sequence[RationalLike], starts: Optional[Sequence[RationalLike]] = None,
                    circle: Circle = UNIT_CIRCLE, distinct_speeds: bool = True) -> "RunnerSchedule":
        """Build an all-rational schedule from plain numbers."""
        starts = list(starts) if starts is not None else [0] * len(speeds)
        if len(starts) != len(speeds):
            raise InvalidParameterError("speeds and starts differ in length")
        runners = [Runner(SpeedValue.of(v), to_rational(b)) for v, b in zip(speeds, starts)]
        return cls(circle, tuple(runners), distinct_speeds)

    @property
    def speeds(self) -> List[SpeedValue]:
        return [runner.speed for runner in self.runners]

    @property
    def is_rational(self) -> bool:
        return all(runner.speed.is_rational for runner in self.runners)

    def without(self, index: int) -> "RunnerSchedule":
        """Copy with runner ``index`` (0-based) removed."""
        runners = self.runners[:index] + self.runners[index + 1:]
        return RunnerSchedule(self.circle, runners, self.distinct_speeds)

    def rotated(self, offset: Fraction) -> "RunnerSchedule":
        """Copy with every start position shifted by ``offset``."""
        runners = tuple(Runner(r.speed, self.circle.wrap(r.start + offset)) for r in self.runners)
        return RunnerSchedule(self.circle, runners, self.distinct_speeds)


def position(runner: Runner, t: RationalLike, circle: Circle = UNIT_CIRCLE) -> Fraction:
    """
    Exact position ``(beta + v t) mod L`` of a rational-speed runner.

    Raises:
        IrrationalSpeedError: For q*sqrt(d) speeds with d > 1
        InvalidParameterError: For negative times
    """
    t = to_rational(t)
    if t < 0:
        raise InvalidParameterError(f"time must be >= 0, got {t}")
    v = runner.speed.as_rational()
    return circle.wrap(runner.start + v * t)


def in_arc(x: RationalLike, arc: Arc, circle: Circle = UNIT_CIRCLE) -> bool:
    """Membership in the closed arc; endpoints count as inside."""
    offset = circle.wrap(to_rational(x) - arc.start)
    return offset <= arc.arc_length


def circular_distance(x: Fraction, y: Fraction, circle: Circle = UNIT_CIRCLE) -> Fraction:
    """Shortest distance between two points along the circle."""
    d = circle.wrap(x - y)
    return min(d, circle.length - d)
