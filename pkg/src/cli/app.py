"""
Command-line surface: construct, verify, search, idle-time and trace.

Exit codes: 0 success, 1 a negative answer (verification failed or no
rendezvous exists), 2 bad input, 3 search budget exhausted, 4 precision
exhausted.
"""

import logging
import random
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple

import typer
from rich.console import Console
from rich.table import Table

from src.core.config import settings
from src.core.rational import format_rational
from src.exceptions import DocumentParseError, InvalidParameterError
from src.schemas.schedule_schemas import ConstructionKind, ScheduleDocument, load_document
from src.services.base.validators import BOUNDARIES, METHODS
from src.services.constructions import CLOSED
from src.services.orchestrator import ScheduleOrchestrator
from src.utils.exception_handlers import handle_exception
from src.utils.logging.activity_logger import activity_logger
from src.utils.logging.error_logger import error_logger
from src.utils.serialization import dumps, interval_set_csv, trace_csv

logger = logging.getLogger(__name__)

app = typer.Typer(
    name=settings.app_name,
    help="Constant-speed runners on a circle: constructions, exact verification, "
         "certified rendezvous search and patrol idle times.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console()


@dataclass
class CliState:
    json_output: bool = False
    seed: Optional[int] = None
    precision: int = settings.precision_bits
    workers: int = settings.search_workers

    def orchestrator(self) -> ScheduleOrchestrator:
        return ScheduleOrchestrator(workers=self.workers, precision_bits=self.precision)


def _configure_logging(verbose: bool, log_dir: Optional[Path]) -> None:
    level = logging.DEBUG if verbose else getattr(logging, settings.log_level.upper(), logging.WARNING)
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        force=True,
    )
    if log_dir is not None:
        activity_logger.configure(log_dir)
        error_logger.configure(log_dir)


def _version_callback(value: bool) -> None:
    if value:
        typer.echo(f"{settings.app_name} {settings.app_version}")
        raise typer.Exit()


def _state(ctx: typer.Context) -> CliState:
    return ctx.ensure_object(CliState)


def _execute(command: str, parameters: Dict[str, Any], action: Callable[[], int]) -> None:
    """Run ``action``, turn errors into exit codes and record the run."""
    started = time.perf_counter()
    try:
        code = action()
        outcome = {"exit_code": code}
    except Exception as exc:
        code = handle_exception(exc, command)
        outcome = {"exit_code": code, "reason": getattr(exc, "reason", "internal-error")}
    activity_logger.log_run(command, parameters, outcome, time.perf_counter() - started)
    if code:
        raise typer.Exit(code)


def _emit(state: CliState, title: str, body: Dict[str, Any]) -> None:
    if state.json_output:
        typer.echo(dumps(body))
        return
    table = Table(title=title, show_header=False)
    for key in sorted(body):
        table.add_row(key, _plain(body[key]))
    console.print(table)


def _plain(value: Any) -> str:
    if isinstance(value, Fraction):
        return format_rational(value)
    if isinstance(value, (list, tuple)):
        return ", ".join(_plain(item) for item in value)
    if isinstance(value, dict):
        return ", ".join(f"{key}={_plain(item)}" for key, item in sorted(value.items()))
    return str(value)


def _arc(arc: Optional[Tuple[Optional[str], Optional[str]]]) -> Optional[Tuple[str, str]]:
    """Unset --arc arrives as (None, None)."""
    if arc is None or arc[0] is None:
        return None
    return arc


def _read_document(path: Path):
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise DocumentParseError(f"cannot read {path}: {exc.strerror}")
    return load_document(text)


def _read_schedule(path: Path) -> ScheduleDocument:
    document = _read_document(path)
    if not isinstance(document, ScheduleDocument):
        raise DocumentParseError(f"{path} is a patrol document; a runner schedule is required")
    return document


@app.callback()
def main(
    ctx: typer.Context,
    json_output: bool = typer.Option(False, "--json", help="Print reports as canonical JSON."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Seed for randomized start positions."),
    precision: int = typer.Option(settings.precision_bits, "--precision", help="Certified precision in bits."),
    workers: int = typer.Option(settings.search_workers, "--workers", help="Worker processes."),
    log_dir: Optional[Path] = typer.Option(None, "--log-dir", help="Write JSON run and error logs here."),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Debug logging on stderr."),
    version: bool = typer.Option(False, "--version", callback=_version_callback, is_eager=True,
                                 help="Show the version and exit."),
):
    """Constant-speed runners on a circle."""
    _configure_logging(verbose, log_dir)
    ctx.obj = CliState(json_output=json_output, seed=seed, precision=precision, workers=workers)


@app.command()
def construct(
    ctx: typer.Context,
    kind: ConstructionKind = typer.Argument(..., help="no-shade or rendezvous"),
    shade_length: Optional[str] = typer.Option(None, "--shade-length", help="Shade arc length p/q (no-shade)."),
    k: Optional[int] = typer.Option(None, "--k", help="Number of runners."),
    arc_length: Optional[str] = typer.Option(None, "--arc-length", help="Target arc length p/q (rendezvous)."),
    start: Optional[List[str]] = typer.Option(None, "--start", help="Start position p/q; repeat once per runner."),
    random_starts: bool = typer.Option(False, "--random-starts", help="Seeded random rational starts (rendezvous)."),
    out: Optional[Path] = typer.Option(None, "--out", help="Write the document here instead of stdout."),
):
    """Emit a construction as a schedule document."""
    state = _state(ctx)

    def action() -> int:
        orchestrator = state.orchestrator()
        if kind == ConstructionKind.NO_SHADE:
            if shade_length is None:
                raise InvalidParameterError("--shade-length is required for no-shade")
            document = orchestrator.construct_no_shade(shade_length, k)
        else:
            if k is None or arc_length is None:
                raise InvalidParameterError("--k and --arc-length are required for rendezvous")
            starts = list(start) if start else None
            if random_starts:
                rng = random.Random(state.seed)
                starts = [format_rational(Fraction(rng.randrange(1000), 1000)) for _ in range(max(k, 0))]
            document = orchestrator.construct_rendezvous(k, arc_length, starts)
        text = dumps(document)
        if out is not None:
            out.write_text(text + "\n", encoding="utf-8")
        else:
            typer.echo(text)
        return 0

    _execute("construct", {"kind": kind.value, "shade_length": shade_length, "k": k, "arc_length": arc_length}, action)


@app.command()
def verify(
    ctx: typer.Context,
    file: Path = typer.Argument(..., help="Schedule document."),
    arc: Optional[Tuple[str, str]] = typer.Option((None, None), "--arc", help="Shade arc START LENGTH; defaults to the recorded arc."),
    emit_intervals: Optional[Path] = typer.Option(None, "--emit-intervals", help="Write the covering set as CSV."),
):
    """Check that some runner is outside the shade at every time (exit 1 with a witness if not)."""
    state = _state(ctx)

    def action() -> int:
        outcome = state.orchestrator().verify(_read_schedule(file), _arc(arc))
        if emit_intervals is not None and outcome.covered is not None:
            emit_intervals.write_text(
                interval_set_csv(outcome.covered.period, outcome.covered.intervals), encoding="utf-8"
            )
        _emit(state, "verify", outcome.body)
        return 0 if outcome.holds else 1

    _execute("verify", {"file": str(file), "arc": arc}, action)


@app.command()
def search(
    ctx: typer.Context,
    file: Path = typer.Argument(..., help="Schedule document."),
    arc: Optional[Tuple[str, str]] = typer.Option((None, None), "--arc", help="Target arc START LENGTH; defaults to the recorded arc."),
    after: str = typer.Option("0", "--after", help="Find a time strictly after T."),
    budget: Optional[int] = typer.Option(None, "--budget", help="Probe budget for irrational speeds."),
    precision: Optional[int] = typer.Option(None, "--precision", help="Certified precision in bits."),
    boundary: str = typer.Option(CLOSED, "--boundary", help=f"Arc boundary for exact search: {' or '.join(BOUNDARIES)}."),
    method: str = typer.Option("intervals", "--method", help=f"Exact method: {' or '.join(METHODS)}."),
    restarts: int = typer.Option(0, "--restarts", help="Restart an exhausted probe window this many times."),
):
    """Find a time after T at which every runner is inside the arc."""
    state = _state(ctx)

    def action() -> int:
        outcome = state.orchestrator().search(
            _read_schedule(file), _arc(arc), after, budget, precision or state.precision, boundary, method, restarts
        )
        _emit(state, "search", outcome.body)
        return 0 if outcome.found else 1

    _execute(
        "search",
        {"file": str(file), "arc": arc, "after": after, "budget": budget, "boundary": boundary, "method": method},
        action,
    )


@app.command("idle-time")
def idle_time(
    ctx: typer.Context,
    file: Path = typer.Argument(..., help="Schedule or patrol document."),
    grid: Optional[str] = typer.Option(None, "--grid", help="Sample spacing p/q; forces the estimate mode."),
):
    """Idle time of a patrol: exact for constant-speed runners, bounds otherwise."""
    state = _state(ctx)

    def action() -> int:
        body = state.orchestrator().idle(_read_document(file), grid)
        _emit(state, "idle-time", body)
        return 0

    _execute("idle-time", {"file": str(file), "grid": grid}, action)


@app.command()
def trace(
    ctx: typer.Context,
    file: Path = typer.Argument(..., help="Schedule document."),
    rate: int = typer.Option(settings.trace_rate, "--rate", help="Samples per unit time."),
    duration: str = typer.Option("1", "--duration", help="Trace length p/q."),
    out: Optional[Path] = typer.Option(None, "--out", help="Write CSV here instead of stdout."),
):
    """Emit runner positions over time as CSV."""
    state = _state(ctx)

    def action() -> int:
        rows = state.orchestrator().trace(_read_schedule(file), rate, duration)
        text = trace_csv(rows)
        if out is not None:
            out.write_text(text, encoding="utf-8")
        else:
            typer.echo(text, nl=False)
        return 0

    _execute("trace", {"file": str(file), "rate": rate, "duration": duration}, action)
