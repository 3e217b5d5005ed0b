"""
Exact rational helpers.

``Rational`` is ``fractions.Fraction``: arbitrary-precision numerator, positive
denominator, always in lowest terms. The helpers here give it the canonical
``"p/q"`` string form used by every file format.
"""

import math
import re
from fractions import Fraction
from typing import Iterable, Union

from src.exceptions import DocumentParseError

Rational = Fraction
RationalLike = Union[Fraction, int, str]

_RATIONAL_PATTERN = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*(\d+)\s*)?$")


def parse_rational(text: str) -> Fraction:
    """
    Parse a ``"p/q"`` or ``"p"`` literal.

    Decimal and float notation is refused so that nothing passes through binary
    floating point on the way in.

    Raises:
        DocumentParseError: If the literal is malformed or q is zero
    """
    if not isinstance(text, str):
        raise DocumentParseError(f"rational must be a 'p/q' string, got {type(text).__name__}")
    match = _RATIONAL_PATTERN.match(text)
    if not match:
        raise DocumentParseError(f"malformed rational '{text}'")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) is not None else 1
    if denominator == 0:
        raise DocumentParseError(f"malformed rational '{text}': zero denominator")
    return Fraction(numerator, denominator)


def to_rational(value: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings; floats are refused."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise DocumentParseError("booleans are not rationals")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise DocumentParseError(f"cannot interpret {value!r} as an exact rational")


def format_rational(value: Fraction) -> str:
    """Canonical lowest-terms form, denominator always present: ``3/1``."""
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_compact(value: Fraction) -> str:
    """Human form for messages: integers without the ``/1``."""
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def frac_mod(x: Fraction, modulus: Fraction) -> Fraction:
    """Representative of x modulo ``modulus`` in ``[0, modulus)``."""
    return x - modulus * math.floor(x / modulus)


def rational_lcm(values: Iterable[Fraction]) -> Fraction:
    """
    Least common multiple of positive rationals.

    For p_i/q_i in lowest terms this is lcm(p_i) / gcd(q_i): the smallest
    positive rational that is an integer multiple of every input.
    """
    numerators = []
    denominators = []
    for value in values:
        value = Fraction(value)
        if value <= 0:
            raise ValueError(f"lcm needs positive rationals, got {value}")
        numerators.append(value.numerator)
        denominators.append(value.denominator)
    if not numerators:
        raise ValueError("lcm of an empty collection")
    return Fraction(math.lcm(*numerators), math.gcd(*denominators))


def rational_gcd(x: Fraction, y: Fraction) -> Fraction:
    """Largest positive rational g with x/g and y/g both integers."""
    x, y = Fraction(x), Fraction(y)
    denominator = math.lcm(x.denominator, y.denominator)
    return Fraction(math.gcd(int(x * denominator), int(y * denominator)), denominator)
