"""
Validators for schedule service inputs.
Every check returns the normalized value or raises InvalidParameterError;
malformed rational literals raise DocumentParseError.
"""

import logging
from fractions import Fraction
from typing import Any, Optional, Tuple

from src.core.models import Arc, UNIT_CIRCLE, Circle
from src.core.rational import to_rational
from src.exceptions import DocumentParseError, InvalidParameterError

logger = logging.getLogger(__name__)

BOUNDARIES = ("closed", "open")
METHODS = ("intervals", "induction")


class ScheduleValidator:
    """
    Validator class for CLI and service parameters.
    """

    def __init__(self):
        self.logger = logger

    def rational(self, value: Any, name: str) -> Fraction:
        """
        Parse a rational given as text or number.

        Raises:
            DocumentParseError: If the value is not an exact rational literal
        """
        try:
            return to_rational(value)
        except DocumentParseError as exc:
            raise DocumentParseError(f"{name}: {exc.detail}")

    def validate_shade_length(self, value: Any) -> Fraction:
        length = self.rational(value, "shade length")
        if not 0 < length < 1:
            raise InvalidParameterError(f"shade length must lie in (0, 1), got {length}")
        return length

    def validate_arc_length(self, value: Any, circle: Circle = UNIT_CIRCLE) -> Fraction:
        length = self.rational(value, "arc length")
        if not 0 < length <= circle.length:
            raise InvalidParameterError(f"arc length must lie in (0, {circle.length}], got {length}")
        return length

    def validate_arc(self, start: Any, length: Any, circle: Circle = UNIT_CIRCLE) -> Arc:
        start = self.rational(start, "arc start")
        if not 0 <= start < circle.length:
            raise InvalidParameterError(f"arc start must lie in [0, {circle.length}), got {start}")
        arc = Arc(start, self.validate_arc_length(length, circle))
        arc.validate_on(circle)
        return arc

    def validate_k(self, k: Optional[int]) -> Optional[int]:
        if k is not None and k < 1:
            raise InvalidParameterError(f"k must be >= 1, got {k}")
        return k

    def validate_time(self, value: Any, name: str = "T") -> Fraction:
        t = self.rational(value, name)
        if t < 0:
            raise InvalidParameterError(f"{name} must be >= 0, got {t}")
        return t

    def validate_positive(self, value: Any, name: str) -> Fraction:
        x = self.rational(value, name)
        if x <= 0:
            raise InvalidParameterError(f"{name} must be > 0, got {x}")
        return x

    def validate_count(self, value: int, name: str, minimum: int = 1) -> int:
        if value < minimum:
            raise InvalidParameterError(f"{name} must be >= {minimum}, got {value}")
        return value

    def validate_precision(self, bits: int) -> int:
        if bits < 64:
            raise InvalidParameterError(f"precision must be >= 64 bits, got {bits}")
        return bits

    def validate_choice(self, value: str, choices: Tuple[str, ...], name: str) -> str:
        if value not in choices:
            raise InvalidParameterError(f"{name} must be one of {', '.join(choices)}, got {value!r}")
        return value

    def validate_starts(self, starts: Optional[list], count: int) -> Optional[list]:
        if starts is None:
            return None
        if len(starts) != count:
            raise InvalidParameterError(f"expected {count} starts, got {len(starts)}")
        parsed = [self.rational(s, f"start {i + 1}") for i, s in enumerate(starts)]
        for i, s in enumerate(parsed):
            if not 0 <= s < 1:
                raise InvalidParameterError(f"start {i + 1} must lie in [0, 1), got {s}")
        return parsed
