import logging
from datetime import datetime
from logging.handlers import RotatingFileHandler, TimedRotatingFileHandler
from pathlib import Path
from typing import Any, Dict, Optional, Union

from src.core.config import settings
from src.utils.serialization import dumps_line

# Configure logging
activity_log = logging.getLogger("activity_logger")
activity_log.setLevel(logging.INFO)
activity_log.propagate = False


class ActivityLogger:
    """
    Run log: one JSON entry per CLI computation.
    Nothing is written until ``configure`` is given a directory.
    """

    def __init__(self):
        """Initialize the activity logger without handlers."""
        self.logs_dir: Optional[Path] = None
        self.max_file_size = settings.activity_log_max_size_mb * 1024 * 1024
        self.rotation_when = settings.activity_log_rotation

    def configure(self, log_dir: Union[str, Path]) -> None:
        """Attach timed and size-rotating handlers under ``log_dir/activity``."""
        self.logs_dir = Path(log_dir) / "activity"
        self.logs_dir.mkdir(parents=True, exist_ok=True)
        self._configure_handlers()

    def _configure_handlers(self):
        """Configure file handlers for logging."""
        # Clear existing handlers
        for handler in list(activity_log.handlers):
            handler.close()
            activity_log.removeHandler(handler)

        formatter = logging.Formatter(
            '%(asctime)s [%(levelname)s] %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S %z'
        )

        timed_handler = TimedRotatingFileHandler(
            filename=self.logs_dir / "activity.log",
            when=self.rotation_when,
            backupCount=30  # Keep logs for 30 days
        )
        timed_handler.setFormatter(formatter)
        activity_log.addHandler(timed_handler)

        size_handler = RotatingFileHandler(
            filename=self.logs_dir / "activity_size.log",
            maxBytes=self.max_file_size,
            backupCount=10  # Keep 10 backup files
        )
        size_handler.setFormatter(formatter)
        activity_log.addHandler(size_handler)

    @property
    def enabled(self) -> bool:
        return self.logs_dir is not None

    def log_run(
        self,
        command: str,
        parameters: Optional[Dict[str, Any]] = None,
        outcome: Optional[Dict[str, Any]] = None,
        elapsed: Optional[float] = None,
    ) -> None:
        """
        Log one computation.

        Args:
            command: The CLI subcommand
            parameters: Flags and inputs the computation ran with
            outcome: Short summary of the result (exit code, witness, ...)
            elapsed: Wall time in seconds
        """
        if not self.enabled:
            return
        log_entry = {
            "timestamp": datetime.now().isoformat(),
            "app": settings.app_name,
            "command": command,
            "parameters": parameters or {},
            "outcome": outcome or {},
            "elapsed_seconds": round(elapsed, 6) if elapsed is not None else None,
        }
        activity_log.info(dumps_line(log_entry))


# Global instance for convenience
activity_logger = ActivityLogger()
