import random
from fractions import Fraction

import pytest

from src.core.models import Arc, RunnerSchedule
from src.services.constructions import build_no_shade


@pytest.fixture
def rng():
    """Seeded generator so randomized checks are reproducible."""
    return random.Random(20240607)


@pytest.fixture
def half_shade():
    """The shade arc [1/2, 1] of length 1/2."""
    return Arc(Fraction(1, 2), Fraction(1, 2))


@pytest.fixture
def half_shade_construction(half_shade):
    return build_no_shade(half_shade)


@pytest.fixture
def unit_runner():
    return RunnerSchedule.from_values([1])


def random_rational(rng: random.Random, denominator: int = 97, upper: int = 1) -> Fraction:
    """Uniform-ish rational in [0, upper) with a bounded denominator."""
    return Fraction(rng.randrange(upper * denominator), denominator)
