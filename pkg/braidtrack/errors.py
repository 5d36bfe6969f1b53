"""
Exception hierarchy for braidtrack.

KEY CONCEPT: FAILURES THAT CHANGE THE RUN
=========================================
Most failures simply abort a computation. A few are signals:
- RegularizationError: a crossed fiber was improper or non-transversal;
  the engine retries the whole run under a new rotation lambda.
- EndpointCrossingError: a crossing sits on a segment endpoint;
  the engine re-routes that single loop with a perturbed polygon phase.
Everything else propagates to the caller (the CLI maps it to an exit code).
"""

from typing import Any, Dict, List, Optional, Sequence


class BraidTrackError(Exception):
    """Base class for every error raised by this package."""

    def to_dict(self) -> Dict[str, Any]:
        return {"status": "error", "error": type(self).__name__, "message": str(self)}


# =========================================================
# INPUT
# =========================================================

class PolynomialParseError(BraidTrackError):
    """Syntax error or unknown variable in polynomial text."""

    def __init__(self, message: str, position: int = 0, source: str = ""):
        self.position = position
        self.source = source
        super().__init__(f"{message} (at position {position})")


class DegreeError(BraidTrackError):
    """Polynomial degree does not satisfy an operation's precondition."""


class WordSyntaxError(BraidTrackError):
    """Malformed braid word text."""


class RelationMismatchError(BraidTrackError):
    """The letters at a position do not match the requested relation."""


class ReportFormatError(BraidTrackError):
    """A report file is not a well-formed group report."""


class ArrangementError(BraidTrackError):
    """Invalid line arrangement (zero column, proportional lines, d < 2, ...)."""


class NonGenericLineError(BraidTrackError):
    """The leading z-coefficient vanishes identically on the chosen line."""


# =========================================================
# NUMERICS
# =========================================================

class RootSolveError(BraidTrackError):
    """Simultaneous iteration did not converge."""

    def __init__(self, message: str, residuals: Optional[Sequence[float]] = None):
        self.residuals = list(residuals or [])
        super().__init__(message)


class DegenerateDiscriminantError(BraidTrackError):
    """Res_z(f, f_z) vanishes identically: f has a repeated factor."""


class TrackingError(BraidTrackError):
    """Path tracking failed along a segment."""

    def __init__(self, message: str, t: Optional[complex] = None, s: Optional[float] = None):
        self.t = t
        self.s = s
        super().__init__(message)


class StepUnderflowError(TrackingError):
    """Step size fell below step_min (segment passes too near the branch locus)."""


class NewtonDivergenceError(TrackingError):
    """Newton's method failed to reach the requested residual."""


class CriticalPointError(NewtonDivergenceError):
    """Derivative collapse: the iterate approaches a multiple root."""


# =========================================================
# CROSSINGS AND LOOPS
# =========================================================

class RegularizationError(BraidTrackError):
    """Crossing cannot be resolved under the current lambda."""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None):
        self.witness = witness or {}
        super().__init__(message)


class ImproperCrossingError(RegularizationError):
    """Three or more strands share a real part."""


class NonTransversalCrossingError(RegularizationError):
    """Real-part difference has a vanishing derivative at the crossing."""


class EndpointCrossingError(BraidTrackError):
    """A crossing lies on a segment endpoint."""

    def __init__(self, message: str, segment_index: Optional[int] = None):
        self.segment_index = segment_index
        super().__init__(message)


class LambdaExhaustedError(BraidTrackError):
    """Every lambda attempt hit an improper or non-transversal crossing."""

    def __init__(self, message: str, witness: Optional[Dict[str, Any]] = None,
                 attempts: int = 0):
        self.witness = witness or {}
        self.attempts = attempts
        super().__init__(message)


class LoopRoutingError(BraidTrackError):
    """No keyhole loop satisfying the clearance and winding checks was found."""

    def __init__(self, message: str, geometry: Optional[Dict[str, Any]] = None):
        self.geometry = geometry or {}
        super().__init__(message)


class ConsistencyError(BraidTrackError):
    """Two independent computations of the same quantity disagree."""

    def __init__(self, message: str, details: Optional[List[Any]] = None):
        self.details = details or []
        super().__init__(message)
