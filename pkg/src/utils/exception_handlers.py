import logging
from typing import Optional

import typer
from pydantic import ValidationError

from src.exceptions import DocumentParseError, TrackshadeError
from src.utils.logging.error_logger import error_logger

logger = logging.getLogger(__name__)

# Exit code for failures that are bugs rather than bad input
INTERNAL_ERROR_EXIT = 70


def format_reason(reason: str, detail: str) -> str:
    """The one-line, machine-parsable error message."""
    escaped = detail.replace("\\", "\\\\").replace('"', '\\"').replace("\n", " ")
    return f'error reason={reason} detail="{escaped}"'


# TrackshadeError handler
def trackshade_exception_handler(exc: TrackshadeError, command: Optional[str] = None) -> int:
    logger.debug(f"{exc.__class__.__name__}: {exc.detail}")
    error_logger.log_error(exc, command, {"reason": exc.reason, "exit_code": exc.exit_code})
    typer.echo(format_reason(exc.reason, exc.detail), err=True)
    return exc.exit_code


# Pydantic ValidationError handler
def pydantic_validation_error_handler(exc: ValidationError, command: Optional[str] = None) -> int:
    from src.schemas.schedule_schemas import describe_validation_error

    return trackshade_exception_handler(DocumentParseError(describe_validation_error(exc)), command)


# Anything else is a bug
def unexpected_exception_handler(exc: Exception, command: Optional[str] = None) -> int:
    logger.exception(f"Unexpected error: {exc}")
    error_logger.log_error(exc, command)
    typer.echo(format_reason("internal-error", str(exc) or exc.__class__.__name__), err=True)
    return INTERNAL_ERROR_EXIT


def handle_exception(exc: Exception, command: Optional[str] = None) -> int:
    """Report ``exc`` on stderr and return the process exit code."""
    if isinstance(exc, TrackshadeError):
        return trackshade_exception_handler(exc, command)
    if isinstance(exc, ValidationError):
        return pydantic_validation_error_handler(exc, command)
    return unexpected_exception_handler(exc, command)
