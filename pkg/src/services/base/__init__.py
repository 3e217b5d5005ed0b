"""
Shared infrastructure for the schedule services.
"""

from .service_base import BaseService
from .validators import ScheduleValidator

__all__ = ["BaseService", "ScheduleValidator"]
