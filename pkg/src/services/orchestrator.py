"""
Schedule orchestrator service.
Coordinates the construction, verification, search and patrol services behind
one interface used by the CLI.
"""

import logging
from concurrent.futures import Executor, ProcessPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Iterator, List, Optional, Tuple, Union

import mpmath

from src.core.config import settings
from src.core.models import Arc, RunnerSchedule, circular_distance, position
from src.core.rational import format_rational
from src.exceptions import InvalidParameterError, PrecisionExhaustedError
from src.schemas.schedule_schemas import (
    ConstructionKind,
    PatrolDocument,
    ScheduleDocument,
)
from src.services.base import BaseService, ScheduleValidator
from src.services.base.validators import BOUNDARIES, METHODS
from src.services.constructions import (
    CLOSED,
    build_no_shade,
    find_rendezvous_time,
    inductive_rendezvous_time,
    rendezvous_schedule,
    runner_count_estimate,
    verify_no_shade,
)
from src.services.interval_algebra import PeriodicIntervalSet
from src.services.kronecker import (
    KroneckerQuery,
    check_independence,
    eval_position,
    kronecker_search_with_restarts,
    verify_witness,
)
from src.services.patrol import idle_time

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VerifyOutcome:
    """Result of ``verify``: a JSON body plus the covering set for CSV export."""
    holds: bool
    body: Dict[str, Any]
    covered: Optional[PeriodicIntervalSet]


@dataclass(frozen=True)
class SearchOutcome:
    """``found`` False means the exact search proved that no time exists."""
    found: bool
    body: Dict[str, Any]


class ScheduleOrchestrator(BaseService):
    """
    Main orchestrator for all schedule services.
    Turns validated CLI parameters into service calls and report bodies.
    """

    def __init__(self, workers: Optional[int] = None, precision_bits: Optional[int] = None):
        """
        Initialize the schedule orchestrator.

        Args:
            workers: Worker processes for set merging and probe partitioning
            precision_bits: Default certified precision for irrational speeds
        """
        super().__init__(ScheduleValidator())
        self.workers = self.validator.validate_count(
            workers if workers is not None else settings.search_workers, "workers"
        )
        self.precision_bits = self.validator.validate_precision(
            precision_bits if precision_bits is not None else settings.precision_bits
        )

    def get_service_name(self) -> str:
        return "ScheduleOrchestrator"

    @contextmanager
    def _executor(self) -> Iterator[Optional[Executor]]:
        if self.workers <= 1:
            yield None
            return
        with ProcessPoolExecutor(max_workers=self.workers) as pool:
            yield pool

    # Constructions
    def construct_no_shade(self, shade_length: Any, k: Optional[int] = None) -> ScheduleDocument:
        """
        Build the no-shade schedule for a shade arc [1 - length, 1].

        Raises:
            InvalidParameterError: If the length is outside (0, 1) or k too small
            InfeasibleScaleError: If the required team is too large to build
        """
        try:
            length = self.validator.validate_shade_length(shade_length)
            k = self.validator.validate_k(k)
            if k is None:
                estimate = runner_count_estimate(1 - length)
                self._log_debug(f"Team size estimate for shade {length}: {estimate.describe()}")
            shade = Arc(1 - length, length)
            with self._timed("build_no_shade"):
                construction = build_no_shade(shade, k)
            meta = construction.metadata()
            meta["arc"] = {"start": shade.start, "length": shade.arc_length}
            self._log_info(f"Constructed no-shade schedule: length={length}, k={construction.k}")
            return ScheduleDocument.from_schedule(construction.schedule, meta)
        except Exception as e:
            self._handle_service_error(e, "Error constructing no-shade schedule")

    def construct_rendezvous(self, k: int, arc_length: Any, starts: Optional[List[Any]] = None) -> ScheduleDocument:
        try:
            self.validator.validate_count(k, "k")
            a = self.validator.validate_arc_length(arc_length)
            if a >= 1:
                raise InvalidParameterError(f"arc length must be < 1, got {a}")
            starts = self.validator.validate_starts(starts, k)
            schedule = rendezvous_schedule(k, a, starts)
            meta = {
                "kind": ConstructionKind.RENDEZVOUS.value,
                "a": a,
                "k": k,
                "arc": {"start": Fraction(0), "length": a},
            }
            self._log_info(f"Constructed rendezvous schedule: k={k}, a={a}")
            return ScheduleDocument.from_schedule(schedule, meta)
        except Exception as e:
            self._handle_service_error(e, "Error constructing rendezvous schedule")

    # Verification and search
    def _resolve_arc(self, document: ScheduleDocument, arc: Optional[Tuple[Any, Any]]) -> Arc:
        """Explicit ``--arc`` wins; otherwise the arc recorded with the construction."""
        circle = document.to_schedule().circle
        if arc is not None:
            return self.validator.validate_arc(arc[0], arc[1], circle)
        meta = document.construction
        if meta is None or meta.arc is None:
            raise InvalidParameterError("no --arc given and the document records no arc")
        return self.validator.validate_arc(meta.arc.start, meta.arc.length, circle)

    def verify(self, document: ScheduleDocument, arc: Optional[Tuple[Any, Any]] = None) -> VerifyOutcome:
        """Check that some runner is outside the shade ``arc`` at every time."""
        try:
            schedule = document.to_schedule()
            shade = self._resolve_arc(document, arc)
            with self._timed("verify_no_shade"), self._executor() as executor:
                verdict = verify_no_shade(schedule, shade, executor)
            body = {
                "holds": verdict.holds,
                "shade_arc": {"start": shade.start, "length": shade.arc_length},
                "runners": len(schedule.runners),
            }
            if verdict.covered is not None:
                body["period"] = verdict.covered.period
                body["intervals"] = len(verdict.covered.intervals)
            if not verdict.holds:
                body["witness"] = verdict.witness
                body["positions"] = [position(r, verdict.witness, schedule.circle) for r in schedule.runners]
            self._log_info(f"Verification {'passed' if verdict.holds else 'failed'} for {len(schedule.runners)} runners")
            return VerifyOutcome(verdict.holds, body, verdict.covered)
        except Exception as e:
            self._handle_service_error(e, "Error verifying schedule")

    def search(self, document: ScheduleDocument, arc: Optional[Tuple[Any, Any]] = None,
               after: Any = "0", budget: Optional[int] = None, precision_bits: Optional[int] = None,
               boundary: str = CLOSED, method: str = "intervals", restarts: int = 0) -> SearchOutcome:
        """
        Find a time after ``after`` with every runner in ``arc``: exact for
        rational speeds, certified Kronecker search for irrational ones.
        """
        try:
            schedule = document.to_schedule()
            target = self._resolve_arc(document, arc)
            T = self.validator.validate_time(after, "after")
            self.validator.validate_choice(boundary, BOUNDARIES, "boundary")
            self.validator.validate_choice(method, METHODS, "method")
            if schedule.is_rational:
                return self._search_exact(schedule, target, T, boundary, method)
            return self._search_certified(schedule, target, T, budget, precision_bits, restarts)
        except Exception as e:
            self._handle_service_error(e, "Error searching for a rendezvous time")

    def _search_exact(self, schedule: RunnerSchedule, arc: Arc, T: Fraction,
                      boundary: str, method: str) -> SearchOutcome:
        with self._timed(f"exact search ({method})"), self._executor() as executor:
            if method == "induction":
                t = inductive_rendezvous_time(schedule, arc, T)
            else:
                t = find_rendezvous_time(schedule, arc, T, boundary, executor)
        body = {"method": "exact", "after": T, "boundary": boundary}
        if t is None:
            body["result"] = "provably empty" if method == "intervals" else "induction step does not apply"
            self._log_info(f"No rendezvous time after {T} ({body['result']})")
            return SearchOutcome(False, body)
        body["t"] = t
        body["positions"] = [position(r, t, schedule.circle) for r in schedule.runners]
        center = schedule.circle.wrap(arc.start + arc.arc_length / 2)
        body["center_distances"] = [circular_distance(x, center, schedule.circle) for x in body["positions"]]
        self._log_info(f"Rendezvous at t={t}")
        return SearchOutcome(True, body)

    def _search_certified(self, schedule: RunnerSchedule, arc: Arc, T: Fraction, budget: Optional[int],
                          precision_bits: Optional[int], restarts: int) -> SearchOutcome:
        bits = self.validator.validate_precision(precision_bits or self.precision_bits)
        if budget is not None:
            self.validator.validate_count(budget, "budget")
        self.validator.validate_count(restarts, "restarts", minimum=0)
        certificate = check_independence(schedule.speeds)
        if not certificate.independent:
            self._log_warning(f"Speeds are rationally dependent: {certificate.reason}; a witness may not exist")
        query = KroneckerQuery.build(schedule.runners, arc, T, budget, bits)
        with self._timed("kronecker search"):
            witness = kronecker_search_with_restarts(query, restarts, self.workers)
        check = verify_witness(schedule.runners, arc, witness.t, 2 * witness.precision_bits, schedule.circle)
        if not check.ok:
            raise PrecisionExhaustedError(
                f"witness t={format_rational(witness.t)} failed re-verification at {check.precision_bits} bits",
                precision_bits=check.precision_bits,
            )
        body = witness.report()
        body.update({
            "method": "kronecker",
            "after": T,
            "epsilon": query.epsilon,
            "independence": certificate.reason,
            "verified_bits": check.precision_bits,
            "boundary_distances": check.distances,
        })
        return SearchOutcome(True, body)

    # Patrols
    def idle(self, document: Union[ScheduleDocument, PatrolDocument], grid: Optional[Any] = None) -> Dict[str, Any]:
        """Exact idle time for constant-speed runners, certified bounds otherwise."""
        try:
            spacing = self.validator.validate_positive(grid, "grid") if grid is not None else None
            if isinstance(document, PatrolDocument):
                schedule = document.to_schedule()
                spacing = spacing if spacing is not None else settings.default_idle_grid
            else:
                schedule = document.to_schedule(distinct_speeds=False)
            with self._timed("idle time"):
                report = idle_time(schedule, spacing)
            self._log_info(f"Idle time ({report.mode}) computed")
            return report.report()
        except Exception as e:
            self._handle_service_error(e, "Error computing idle time")

    def trace(self, document: ScheduleDocument, rate: Optional[int] = None,
              duration: Any = "1") -> List[Tuple[Fraction, int, Any]]:
        """
        Position samples (t, runner, x) for t = 0, 1/rate, ..., duration.
        Irrational runners are reported as certified midpoints in decimal.
        """
        try:
            schedule = document.to_schedule()
            rate = self.validator.validate_count(rate if rate is not None else settings.trace_rate, "rate")
            duration = self.validator.validate_positive(duration, "duration")
            steps = int(duration * rate)
            rows = []
            for step in range(steps + 1):
                t = Fraction(step, rate)
                for index, runner in enumerate(schedule.runners, start=1):
                    if runner.speed.is_rational:
                        rows.append((t, index, position(runner, t, schedule.circle)))
                    else:
                        enclosure = eval_position(runner, t, self.precision_bits, schedule.circle)
                        mid = schedule.circle.wrap((enclosure.lo + enclosure.hi) / 2)
                        rows.append((t, index, mpmath.nstr(mpmath.mpf(mid.numerator) / mid.denominator, 20)))
            self._log_debug(f"Traced {len(rows)} samples")
            return rows
        except Exception as e:
            self._handle_service_error(e, "Error tracing schedule")
