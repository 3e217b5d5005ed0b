import logging
import traceback
from datetime import datetime
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional, Union

from src.core.config import settings
from src.utils.serialization import dumps_line

# Configure logging
error_log = logging.getLogger("error_logger")
error_log.setLevel(logging.ERROR)
error_log.propagate = False


class ErrorLogger:
    """
    Logger for failed computations with detailed context.
    Logs are stored in <log-dir>/errors/ once ``configure`` has been called.
    """

    def __init__(self):
        self.logs_dir: Optional[Path] = None
        self.max_file_size = settings.error_log_max_size_mb * 1024 * 1024
        self.rotation_when = settings.error_log_rotation

    def configure(self, log_dir: Union[str, Path]) -> None:
        self.logs_dir = Path(log_dir) / "errors"
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        self._configure_handlers()

    def _configure_handlers(self):
        """Configure file handlers for logging."""
        for handler in list(error_log.handlers):
            handler.close()
            error_log.removeHandler(handler)

        formatter = logging.Formatter(
            '%(asctime)s [%(levelname)s] %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S %z'
        )

        timed_handler = TimedRotatingFileHandler(
            filename=self.logs_dir / "error.log",
            when=self.rotation_when,
            backupCount=30  # Keep logs for 30 days
        )
        timed_handler.setFormatter(formatter)
        error_log.addHandler(timed_handler)

        size_handler = RotatingFileHandler(
            filename=self.logs_dir / "error_size.log",
            maxBytes=self.max_file_size,
            backupCount=10  # Keep 10 backup files
        )
        size_handler.setFormatter(formatter)
        error_log.addHandler(size_handler)

    def log_error(
        self,
        error: Exception,
        command: Optional[str] = None,
        additional_context: Optional[Dict[str, Any]] = None
    ) -> None:
        """
        Log an error with detailed context.

        Args:
            error: The exception that occurred
            command: The CLI subcommand that failed (optional)
            additional_context: Additional contextual information (optional)
        """
        if self.logs_dir is None:
            return
        stack_trace = traceback.format_exception(type(error), error, error.__traceback__)
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "error_type": error.__class__.__name__,
            "error_message": str(error),
            "reason": getattr(error, "reason", None),
            "command": command,
            "stack_trace": "".join(stack_trace),
            "additional_context": additional_context or {}
        }
        error_log.error(dumps_line(log_entry))


# Global instance for convenience
error_logger = ErrorLogger()
