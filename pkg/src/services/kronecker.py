"""
Certified search for simultaneous arc occupancy with q*sqrt(d) speeds.

Rational independence of such speeds is decidable: distinct squarefree radicands
are independent, equal radicands are not. Positions are enclosed with exact
integer square roots, so every accepted witness is a proof, not an estimate.

Probes are t_j = T + j*delta with delta = a / (3 * max speed): between two probes
no runner moves more than a/3, so a stretch of time of length >= delta during
which every runner sits in the middle third of the arc cannot be skipped.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

from src.core.config import settings
from src.core.models import Arc, Circle, Runner, SpeedValue, UNIT_CIRCLE, square_factor
from src.core.rational import format_rational, frac_mod, to_rational
from src.exceptions import BudgetExhaustedError, InvalidParameterError, PrecisionExhaustedError

logger = logging.getLogger(__name__)

DISTINCT_RADICANDS = "distinct squarefree radicands"


@dataclass(frozen=True)
class IndependenceCertificate:
    independent: bool
    reason: str
    pair: Optional[Tuple[int, int]] = None


def check_independence(speeds: Sequence[SpeedValue]) -> IndependenceCertificate:
    """
    q_1 sqrt(d_1), ..., q_k sqrt(d_k) are rationally independent iff the
    squarefree radicands are pairwise distinct. ``pair`` is 1-based.
    """
    seen = {}
    for index, speed in enumerate(speeds, start=1):
        factor = square_factor(speed.radicand)
        if factor is not None:
            raise InvalidParameterError(
                f"radicand {speed.radicand} of speed {index} is divisible by {factor}^2"
            )
        if speed.radicand in seen:
            pair = (seen[speed.radicand], index)
            return IndependenceCertificate(False, f"speeds {pair[0]} and {pair[1]} share radicand {speed.radicand}", pair)
        seen[speed.radicand] = index
    return IndependenceCertificate(True, DISTINCT_RADICANDS)


@dataclass(frozen=True)
class Enclosure:
    """
    ``lo <= x <= hi`` for the true value x. Positions keep ``lo`` in [0, L)
    and may have ``hi`` slightly past L.
    """
    lo: Fraction
    hi: Fraction

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def enclose_product(speed: SpeedValue, t: Fraction, precision_bits: int) -> Enclosure:
    """Enclosure of speed * t of width <= 2^-precision_bits (exact when rational)."""
    product = speed.coefficient * t
    if speed.is_rational or product == 0:
        return Enclosure(product, product)
    n, m = product.numerator, product.denominator
    scale = 1 << precision_bits
    root = math.isqrt(n * n * speed.radicand * scale * scale)
    return Enclosure(Fraction(root, m * scale), Fraction(root + 1, m * scale))


def eval_position(runner: Runner, t: Fraction, precision_bits: int,
                  circle: Circle = UNIT_CIRCLE) -> Enclosure:
    """
    Certified enclosure of (beta + xi t) mod L; exact for rational speeds and
    of width <= 2^-precision_bits otherwise, whatever the size of t.
    """
    t = to_rational(t)
    if t < 0:
        raise InvalidParameterError(f"time must be >= 0, got {t}")
    if precision_bits < 1:
        raise InvalidParameterError(f"precision must be positive, got {precision_bits}")
    travelled = enclose_product(runner.speed, t, precision_bits)
    lo = circle.wrap(runner.start + travelled.lo)
    return Enclosure(lo, lo + travelled.width)


def arc_membership(enclosure: Enclosure, arc: Arc, circle: Circle = UNIT_CIRCLE) -> Optional[bool]:
    """True/False when the enclosure is certainly inside/outside the closed arc, None otherwise."""
    if arc.is_full(circle):
        return True
    offset = circle.wrap(enclosure.lo - arc.start)
    if offset + enclosure.width <= arc.arc_length:
        return True
    if offset > arc.arc_length and offset + enclosure.width < circle.length:
        return False
    return None


def boundary_distance(enclosure: Enclosure, arc: Arc, circle: Circle = UNIT_CIRCLE) -> Fraction:
    """Lower bound on the distance from an enclosed inside point to the arc ends."""
    if arc.is_full(circle):
        return circle.length
    offset = circle.wrap(enclosure.lo - arc.start)
    return max(Fraction(0), min(offset, arc.arc_length - offset - enclosure.width))


@dataclass(frozen=True)
class KroneckerQuery:
    """
    Targets alpha_m = a/2 + 1 - beta_m (beta measured from the arc start) and
    tolerance epsilon = a/3 unless overridden.
    """
    runners: Tuple[Runner, ...]
    arc: Arc
    T: Fraction
    alphas: Tuple[Fraction, ...]
    epsilon: Fraction
    budget: int
    precision_bits: int
    circle: Circle = UNIT_CIRCLE

    def __post_init__(self):
        if self.precision_bits < 64:
            raise InvalidParameterError(f"precision must be at least 64 bits, got {self.precision_bits}")
        if self.budget < 1:
            raise InvalidParameterError(f"budget must be positive, got {self.budget}")
        if self.T < 0:
            raise InvalidParameterError(f"T must be >= 0, got {self.T}")
        if len(self.alphas) != len(self.runners):
            raise InvalidParameterError("one target per runner is required")
        if not self.runners:
            raise InvalidParameterError("at least one runner is required")
        if self.circle.length != 1:
            raise InvalidParameterError("the Kronecker search works on the unit circle")
        self.arc.validate_on(self.circle)

    @classmethod
    def build(cls, runners: Sequence[Runner], arc: Arc, T: Fraction = Fraction(0),
              budget: Optional[int] = None, precision_bits: Optional[int] = None,
              epsilon: Optional[Fraction] = None,
              alphas: Optional[Sequence[Fraction]] = None) -> "KroneckerQuery":
        a = arc.arc_length
        if alphas is None:
            alphas = [a / 2 + 1 - frac_mod(r.start - arc.start, Fraction(1)) for r in runners]
        return cls(
            tuple(runners),
            arc,
            to_rational(T),
            tuple(to_rational(x) for x in alphas),
            to_rational(epsilon) if epsilon is not None else a / 3,
            budget if budget is not None else settings.kronecker_budget,
            precision_bits if precision_bits is not None else settings.precision_bits,
        )

    @property
    def step(self) -> Fraction:
        """delta = a / (3 * xi_max), with xi_max replaced by a rational upper bound."""
        top = max(r.speed.upper_bound() for r in self.runners)
        return self.arc.arc_length / (3 * top)

    def probe_time(self, j: int) -> Fraction:
        return self.T + j * self.step


@dataclass(frozen=True)
class KroneckerWitness:
    """|t xi_m - p_m - alpha_m| lies in margins[m] for every runner m."""
    t: Fraction
    p: List[int]
    margins: List[Enclosure]
    all_in_arc: bool
    probes_used: int
    precision_bits: int
    positions: List[Enclosure] = field(default_factory=list)

    def report(self) -> dict:
        return {
            "t": format_rational(self.t),
            "probes_used": self.probes_used,
            "p": list(self.p),
            "margins": [{"lo": format_rational(m.lo), "hi": format_rational(m.hi)} for m in self.margins],
            "precision_bits": self.precision_bits,
            "all_in_arc": self.all_in_arc,
        }


@dataclass(frozen=True)
class WitnessCheck:
    ok: bool
    distances: List[Fraction]
    precision_bits: int


def _margin(runner: Runner, t: Fraction, alpha: Fraction, precision_bits: int) -> Tuple[int, Enclosure]:
    """p = round(t xi - alpha) and an enclosure of |t xi - p - alpha|."""
    travelled = enclose_product(runner.speed, t, precision_bits)
    lo = travelled.lo - alpha
    hi = travelled.hi - alpha
    p = math.floor((lo + hi) / 2 + Fraction(1, 2))
    lo, hi = lo - p, hi - p
    if lo >= 0:
        return p, Enclosure(lo, hi)
    if hi <= 0:
        return p, Enclosure(-hi, -lo)
    return p, Enclosure(Fraction(0), max(-lo, hi))


def _probe(query: KroneckerQuery, t: Fraction) -> Optional[KroneckerWitness]:
    """Witness at time t, or None; refines precision until every test is decided."""
    full = query.arc.is_full(query.circle)
    bits = query.precision_bits
    for _ in range(settings.precision_retries + 1):
        undecided = False
        positions, margins, ps = [], [], []
        for runner, alpha in zip(query.runners, query.alphas):
            enclosure = eval_position(runner, t, bits, query.circle)
            inside = arc_membership(enclosure, query.arc, query.circle)
            if inside is False:
                return None
            p, margin = _margin(runner, t, alpha, bits)
            if not full and margin.lo > query.epsilon:
                return None
            if inside is None or (not full and margin.hi > query.epsilon):
                undecided = True
                break
            positions.append(enclosure)
            margins.append(margin)
            ps.append(p)
        if not undecided:
            return KroneckerWitness(t, ps, margins, True, 0, bits, positions)
        bits *= 2
    raise PrecisionExhaustedError(
        f"membership at t={format_rational(t)} undecided at {bits // 2} bits", precision_bits=bits // 2
    )


def _scan(query: KroneckerQuery, first: int, last: int) -> Optional[Tuple[int, KroneckerWitness]]:
    """Smallest winning probe index in [first, last]."""
    for j in range(first, last + 1):
        witness = _probe(query, query.probe_time(j))
        if witness is not None:
            return j, witness
    return None


def kronecker_search(query: KroneckerQuery, workers: Optional[int] = None,
                     chunk_size: int = 100_000) -> KroneckerWitness:
    """
    First probe t_j = T + j*delta (j = 1..budget) at which every runner is
    certified inside the arc with margin <= epsilon; for a full-circle arc the
    first probe wins.

    Raises:
        BudgetExhaustedError: No probe won; ``next_start`` is T + budget*delta
        PrecisionExhaustedError: A probe stayed undecided after all retries
    """
    certificate = check_independence([r.speed for r in query.runners])
    if not certificate.independent:
        logger.warning(f"Speeds are rationally dependent ({certificate.reason}); the search may not terminate")
    workers = workers if workers is not None else settings.search_workers
    logger.info(
        f"Kronecker search: k={len(query.runners)}, T={query.T}, delta={query.step}, "
        f"budget={query.budget}, bits={query.precision_bits}, workers={workers}"
    )
    found = None
    if workers <= 1:
        found = _scan(query, 1, query.budget)
    else:
        chunks = [(s, min(s + chunk_size - 1, query.budget)) for s in range(1, query.budget + 1, chunk_size)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for wave in range(0, len(chunks), workers):
                batch = chunks[wave:wave + workers]
                results = list(pool.map(_scan, [query] * len(batch), [c[0] for c in batch], [c[1] for c in batch]))
                hits = [r for r in results if r is not None]
                if hits:
                    found = min(hits, key=lambda hit: hit[0])
                    break
    if found is None:
        raise BudgetExhaustedError(
            f"no witness within {query.budget} probes after T={format_rational(query.T)}",
            probes_used=query.budget,
            next_start=query.probe_time(query.budget),
        )
    j, witness = found
    logger.info(f"Witness found at probe {j}: t={witness.t}")
    return replace(witness, probes_used=j)


def kronecker_search_with_restarts(query: KroneckerQuery, restarts: int = 0,
                                   workers: Optional[int] = None) -> KroneckerWitness:
    """Re-run the search from T + budget*delta up to ``restarts`` more times."""
    used = 0
    for attempt in range(restarts + 1):
        try:
            witness = kronecker_search(query, workers)
            return replace(witness, probes_used=used + witness.probes_used)
        except BudgetExhaustedError as exc:
            used += exc.probes_used
            if attempt == restarts:
                raise BudgetExhaustedError(exc.detail, probes_used=used, next_start=exc.next_start)
            logger.info(f"Restarting search window at T={exc.next_start}")
            query = replace(query, T=exc.next_start)
    raise AssertionError("unreachable")


def verify_witness(runners: Sequence[Runner], arc: Arc, t: Fraction, precision_bits: int,
                   circle: Circle = UNIT_CIRCLE) -> WitnessCheck:
    """
    Independent recomputation: ok iff every enclosure is inside the closed arc.
    ``distances`` are certified lower bounds on each runner's distance to the
    arc ends (zero for runners found outside).

    Raises:
        PrecisionExhaustedError: If some membership cannot be decided
    """
    t = to_rational(t)
    arc.validate_on(circle)
    distances = []
    ok = True
    for index, runner in enumerate(runners, start=1):
        enclosure = eval_position(runner, t, precision_bits, circle)
        inside = arc_membership(enclosure, arc, circle)
        if inside is None:
            raise PrecisionExhaustedError(
                f"runner {index} at t={format_rational(t)} straddles the arc boundary at {precision_bits} bits",
                precision_bits=precision_bits,
            )
        if inside:
            distances.append(boundary_distance(enclosure, arc, circle))
        else:
            ok = False
            distances.append(Fraction(0))
    return WitnessCheck(ok, distances, precision_bits)
