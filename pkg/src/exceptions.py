from typing import Any, Optional


class TrackshadeError(Exception):
    """
    Base class for every error raised by trackshade.

    Carries a human-readable ``detail``, a machine-parsable ``reason`` code and
    the process exit code the CLI reports for it.
    """
    reason: str = "error"
    exit_code: int = 1
    default_detail: str = "Unexpected error"

    def __init__(self, detail: Any = None) -> None:
        self.detail = str(detail) if detail else self.default_detail
        super().__init__(self.detail)


class InvalidParameterError(TrackshadeError):
    """
    Raised when an input violates a precondition.

    Example usage:
        if not 0 < a < 1:
            raise InvalidParameterError(f"a must lie in (0, 1), got {a}")
    """
    reason = "invalid-parameter"
    exit_code = 2
    default_detail = "Invalid parameter"


class IrrationalSpeedError(InvalidParameterError):
    """
    Raised when an exact (rational-only) operation receives a q*sqrt(d) speed.
    Callers should use the certified evaluation in the kronecker service instead.
    """
    reason = "irrational-speed"
    default_detail = "Operation requires rational speeds"


class InfeasibleScaleError(TrackshadeError):
    """
    Raised when a request is mathematically fine but computationally absurd,
    e.g. a construction needing exp(1000) runners.
    """
    reason = "infeasible-scale"
    exit_code = 2
    default_detail = "Infeasible scale"

    def __init__(self, detail: Any = None, log_required: Optional[float] = None) -> None:
        super().__init__(detail)
        # natural log of the requirement, when known
        self.log_required = log_required


class DocumentParseError(TrackshadeError):
    """
    Raised when a schedule file or a rational literal cannot be parsed.

    Example usage:
        raise DocumentParseError("runners.1.start: denominator is zero")
    """
    reason = "parse-error"
    exit_code = 2
    default_detail = "Malformed document"


class BudgetExhaustedError(TrackshadeError):
    """Raised when a witness search ends without a witness."""
    reason = "budget-exhausted"
    exit_code = 3
    default_detail = "No witness found within the probe budget"

    def __init__(self, detail: Any = None, probes_used: int = 0, next_start: Any = None) -> None:
        super().__init__(detail)
        self.probes_used = probes_used
        # where a restarted search window would begin
        self.next_start = next_start


class PrecisionExhaustedError(TrackshadeError):
    """Raised when certified arithmetic cannot decide an arc membership."""
    reason = "precision-exhausted"
    exit_code = 4
    default_detail = "Precision exhausted; retry with more bits"

    def __init__(self, detail: Any = None, precision_bits: int = 0) -> None:
        super().__init__(detail)
        self.precision_bits = precision_bits
