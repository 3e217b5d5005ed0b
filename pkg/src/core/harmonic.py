"""
Harmonic numbers H_n = 1 + 1/2 + ... + 1/n, exact and bounded.
"""

from fractions import Fraction
from functools import lru_cache
from typing import Tuple

import mpmath

from src.exceptions import InvalidParameterError


@lru_cache(maxsize=64)
def harmonic(n: int) -> Fraction:
    """Exact H_n; H_0 = 0."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise InvalidParameterError(f"harmonic number needs n >= 0, got {n!r}")
    total = Fraction(0)
    for i in range(1, n + 1):
        total += Fraction(1, i)
    return total


def partial_harmonics(n: int) -> list:
    """[H_0, H_1, ..., H_n], summed once."""
    values = [Fraction(0)]
    for i in range(1, n + 1):
        values.append(values[-1] + Fraction(1, i))
    return values


def harmonic_bounds(k: int, dps: int = 50) -> Tuple[mpmath.mpf, mpmath.mpf]:
    """
    Enclosure of H_k from the Euler-Maclaurin bracket

        ln k + gamma + 1/(2k) - 1/(12k^2) <= H_k <= ln k + gamma + 1/(2k)

    evaluated with ``dps`` decimal digits; the returned bounds are widened by a
    few ulps so rounding cannot move them inward.
    """
    if k < 1:
        raise InvalidParameterError(f"harmonic bounds need k >= 1, got {k}")
    with mpmath.workdps(dps):
        k_mp = mpmath.mpf(k)
        centre = mpmath.log(k_mp) + mpmath.euler + 1 / (2 * k_mp)
        slack = mpmath.mpf(10) ** (-(dps - 5))
        lower = centre - 1 / (12 * k_mp * k_mp) - slack
        upper = centre + slack
    return lower, upper
