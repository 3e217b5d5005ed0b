from enum import Enum
from fractions import Fraction
from typing import Any, Dict, List, Optional, Tuple, Union

import orjson
from pydantic import AfterValidator, BaseModel, BeforeValidator, ConfigDict, Field, ValidationError
from typing_extensions import Annotated

from src.core.config import settings
from src.core.models import Circle, Runner, RunnerSchedule, SpeedValue, square_factor
from src.core.rational import format_rational, parse_rational
from src.exceptions import DocumentParseError, TrackshadeError
from src.services.patrol import PatrolAgent, PatrolSchedule, Segment, Trajectory


def _rational_field(value: Any) -> str:
    """Validate a "p/q" string and return it in canonical form."""
    try:
        return format_rational(parse_rational(value))
    except DocumentParseError as exc:
        raise ValueError(exc.detail)


# "p/q" string, canonicalized on the way in
RationalStr = Annotated[str, BeforeValidator(_rational_field)]


def _squarefree(value: int) -> int:
    if value < 1:
        raise ValueError(f"radicand must be a positive integer, got {value}")
    factor = square_factor(value)
    if factor is not None:
        raise ValueError(f"radicand {value} is not squarefree: divisible by {factor}^2")
    return value


Radicand = Annotated[int, AfterValidator(_squarefree)]


class ConstructionKind(str, Enum):
    """Construction kinds the CLI can emit"""
    NO_SHADE = "no-shade"
    RENDEZVOUS = "rendezvous"


class FenceKind(str, Enum):
    """Fence shapes for patrol documents"""
    CIRCLE = "circle"
    SEGMENT = "segment"


class StrictModel(BaseModel):
    model_config = ConfigDict(extra="forbid")


# Schedule documents
class SpeedEntry(StrictModel):
    """Speed coeff * sqrt(radicand)"""
    coeff: RationalStr
    radicand: Radicand = 1


class RunnerEntry(StrictModel):
    speed: SpeedEntry
    start: RationalStr = "0/1"


class ArcEntry(StrictModel):
    start: RationalStr
    length: RationalStr


class ConstructionMeta(StrictModel):
    """Metadata block attached to emitted constructions"""
    kind: ConstructionKind
    a: RationalStr
    k: int
    exit_times: List[RationalStr] = Field(default_factory=list)
    arc: Optional[ArcEntry] = None


class ScheduleDocument(StrictModel):
    """JSON form of a runner schedule"""
    schema_version: int = settings.schema_version
    circle_length: RationalStr = "1/1"
    runners: List[RunnerEntry]
    construction: Optional[ConstructionMeta] = None

    def to_schedule(self, distinct_speeds: bool = True) -> RunnerSchedule:
        runners = []
        for index, entry in enumerate(self.runners):
            try:
                speed = SpeedValue(parse_rational(entry.speed.coeff), entry.speed.radicand)
                runners.append(Runner(speed, parse_rational(entry.start)))
            except TrackshadeError as exc:
                raise DocumentParseError(f"runners.{index}: {exc.detail}")
        try:
            return RunnerSchedule(Circle(parse_rational(self.circle_length)), tuple(runners), distinct_speeds)
        except TrackshadeError as exc:
            raise DocumentParseError(exc.detail)

    @classmethod
    def from_schedule(cls, schedule: RunnerSchedule,
                      construction: Optional[Dict[str, Any]] = None) -> "ScheduleDocument":
        runners = [
            RunnerEntry(
                speed=SpeedEntry(coeff=format_rational(r.speed.coefficient), radicand=r.speed.radicand),
                start=format_rational(r.start),
            )
            for r in schedule.runners
        ]
        meta = None
        if construction is not None:
            meta = ConstructionMeta(**_stringify(construction))
        return cls(circle_length=format_rational(schedule.circle.length), runners=runners, construction=meta)


# Patrol documents
class TrajectoryEntry(StrictModel):
    period: RationalStr
    breakpoints: List[Tuple[RationalStr, RationalStr]]


class AgentEntry(StrictModel):
    max_speed: RationalStr
    trajectory: TrajectoryEntry


class FenceEntry(StrictModel):
    kind: FenceKind = FenceKind.CIRCLE
    length: RationalStr = "1/1"


class PatrolDocument(StrictModel):
    """JSON form of a general periodic piecewise-linear patrol schedule"""
    schema_version: int = settings.schema_version
    fence: FenceEntry = Field(default_factory=FenceEntry)
    agents: List[AgentEntry]

    def to_schedule(self) -> PatrolSchedule:
        length = parse_rational(self.fence.length)
        try:
            fence = Circle(length) if self.fence.kind == FenceKind.CIRCLE else Segment(length)
            agents = tuple(
                PatrolAgent(
                    parse_rational(agent.max_speed),
                    Trajectory(
                        parse_rational(agent.trajectory.period),
                        tuple((parse_rational(t), parse_rational(x)) for t, x in agent.trajectory.breakpoints),
                    ),
                )
                for agent in self.agents
            )
            return PatrolSchedule(fence, agents)
        except TrackshadeError as exc:
            raise DocumentParseError(exc.detail)


def _stringify(value: Any) -> Any:
    """Fractions to canonical strings, recursively."""
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, dict):
        return {key: _stringify(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_stringify(item) for item in value]
    return value


def describe_validation_error(exc: ValidationError) -> str:
    """One line per problem: dotted field path and message."""
    problems = []
    for error in exc.errors():
        path = ".".join(str(part) for part in error["loc"]) or "<document>"
        problems.append(f"{path}: {error['msg']}")
    return "; ".join(problems)


def load_document(text: Union[str, bytes]) -> Union[ScheduleDocument, PatrolDocument]:
    """
    Parse a schedule or patrol document.

    Raises:
        DocumentParseError: With line/column for JSON syntax errors and field
            paths for schema violations
    """
    try:
        data = orjson.loads(text)
    except orjson.JSONDecodeError as exc:
        raise DocumentParseError(f"invalid JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}")
    if not isinstance(data, dict):
        raise DocumentParseError("document must be a JSON object")
    model = PatrolDocument if "agents" in data else ScheduleDocument
    try:
        return model.model_validate(data)
    except ValidationError as exc:
        raise DocumentParseError(describe_validation_error(exc))
