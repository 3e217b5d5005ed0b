from .config import settings
from .harmonic import harmonic, harmonic_bounds, partial_harmonics
from .models import (
    Arc,
    Circle,
    Runner,
    RunnerSchedule,
    SpeedValue,
    UNIT_CIRCLE,
    circular_distance,
    in_arc,
    position,
)
from .rational import Rational, format_rational, parse_rational, to_rational

__all__ = [
    "settings",
    "harmonic",
    "harmonic_bounds",
    "partial_harmonics",
    "Arc",
    "Circle",
    "Runner",
    "RunnerSchedule",
    "SpeedValue",
    "UNIT_CIRCLE",
    "circular_distance",
    "in_arc",
    "position",
    "Rational",
    "format_rational",
    "parse_rational",
    "to_rational",
]
