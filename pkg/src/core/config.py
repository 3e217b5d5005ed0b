from decouple import config
from fractions import Fraction

# Application settings
APP_NAME = config("APP_NAME", default="trackshade")
APP_VERSION = config("APP_VERSION", default="0.1.1")
SCHEMA_VERSION = config("SCHEMA_VERSION", default=1, cast=int)

# Logging Settings
LOG_LEVEL = config("LOG_LEVEL", default="WARNING")
ACTIVITY_LOG_MAX_SIZE_MB = config("ACTIVITY_LOG_MAX_SIZE_MB", default=10, cast=int)
ACTIVITY_LOG_ROTATION = config("ACTIVITY_LOG_ROTATION", default="midnight")
ERROR_LOG_MAX_SIZE_MB = config("ERROR_LOG_MAX_SIZE_MB", default=10, cast=int)
ERROR_LOG_ROTATION = config("ERROR_LOG_ROTATION", default="midnight")

# Construction limits
MAX_RUNNERS = config("MAX_RUNNERS", default=10_000_000, cast=int)
MAX_LIFTED_INTERVALS = config("MAX_LIFTED_INTERVALS", default=5_000_000, cast=int)
EXACT_HARMONIC_LIMIT = config("EXACT_HARMONIC_LIMIT", default=2000, cast=int)

# Kronecker search
KRONECKER_BUDGET = config("KRONECKER_BUDGET", default=10_000_000, cast=int)
PRECISION_BITS = config("PRECISION_BITS", default=128, cast=int)
PRECISION_RETRIES = config("PRECISION_RETRIES", default=6, cast=int)
SEARCH_WORKERS = config("SEARCH_WORKERS", default=1, cast=int)

# Idle time and traces
DEFAULT_IDLE_GRID = config("DEFAULT_IDLE_GRID", default="1/100", cast=Fraction)
TRACE_RATE = config("TRACE_RATE", default=20, cast=int)


# Settings class shared by the services and the CLI
class Settings:
    app_name: str = APP_NAME
    app_version: str = APP_VERSION
    schema_version: int = SCHEMA_VERSION
    log_level: str = LOG_LEVEL
    activity_log_max_size_mb: int = ACTIVITY_LOG_MAX_SIZE_MB
    activity_log_rotation: str = ACTIVITY_LOG_ROTATION
    error_log_max_size_mb: int = ERROR_LOG_MAX_SIZE_MB
    error_log_rotation: str = ERROR_LOG_ROTATION
    max_runners: int = MAX_RUNNERS
    max_lifted_intervals: int = MAX_LIFTED_INTERVALS
    exact_harmonic_limit: int = EXACT_HARMONIC_LIMIT
    kronecker_budget: int = KRONECKER_BUDGET
    precision_bits: int = PRECISION_BITS
    precision_retries: int = PRECISION_RETRIES
    search_workers: int = SEARCH_WORKERS
    default_idle_grid: Fraction = DEFAULT_IDLE_GRID
    trace_rate: int = TRACE_RATE

# Create settings instance
settings = Settings()
