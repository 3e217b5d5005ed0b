"""
Base service class for schedule services.
Provides the named log prefix and the error funnel shared by every service.
"""

import logging
import time
from abc import ABC, abstractmethod
from contextlib import contextmanager
from typing import Iterator, Optional

from src.exceptions import TrackshadeError

from .validators import ScheduleValidator

logger = logging.getLogger(__name__)


class BaseService(ABC):
    """
    Base class for all schedule services.
    Provides logging, validation and error handling helpers.
    """

    def __init__(self, validator: Optional[ScheduleValidator] = None):
        """
        Initialize the base service.

        Args:
            validator: Optional validator instance
        """
        self.validator = validator or ScheduleValidator()
        self.logger = logger

    @abstractmethod
    def get_service_name(self) -> str:
        """
        Get the service name for logging.

        Returns:
            str: The service name
        """
        pass

    def _log_info(self, message: str) -> None:
        self.logger.info(f"[{self.get_service_name()}] {message}")

    def _log_debug(self, message: str) -> None:
        self.logger.debug(f"[{self.get_service_name()}] {message}")

    def _log_warning(self, message: str) -> None:
        self.logger.warning(f"[{self.get_service_name()}] {message}")

    @contextmanager
    def _timed(self, operation: str) -> Iterator[None]:
        """Log how long ``operation`` took."""
        started = time.perf_counter()
        try:
            yield
        finally:
            self._log_debug(f"{operation} took {time.perf_counter() - started:.3f}s")

    def _handle_service_error(self, error: Exception, context: str = ""):
        """
        Handle service errors with proper logging.

        Domain errors are logged at warning level; anything else is a bug and is
        logged with its traceback. The error is always re-raised.

        Args:
            error: The exception that occurred
            context: Context information about the error
        """
        error_msg = f"[{self.get_service_name()}] {context}: {error}"
        if isinstance(error, TrackshadeError):
            self.logger.warning(f"{error_msg} (reason={error.reason})")
        else:
            self.logger.exception(error_msg)

        # Re-raise the error for upstream handling
        raise error
