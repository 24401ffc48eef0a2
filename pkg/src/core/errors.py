"""Exception hierarchy for the beam/fluid simulator.

Every error carries the process exit code the CLI maps it to. Step errors
raised while integrating are annotated with ``step_index`` and
``last_state`` by the driver before they propagate.
"""

from __future__ import annotations

from typing import Any, Optional


class SimulationError(RuntimeError):
    """Base class for all domain errors."""

    exit_code: int = 1

    def __init__(self, message: str, **details: Any):
        super().__init__(message)
        self.details = details
        self.step_index: Optional[int] = None
        self.last_state: Optional[Any] = None

    def annotate(self, step_index: int, last_state: Any) -> "SimulationError":
        self.step_index = step_index
        self.last_state = last_state
        return self


# Geometry ----------------------------------------------------------------


class NonPositiveHeight(SimulationError):
    """Height h <= 0 where the transformation requires h > 0."""


class NonPositiveInput(SimulationError):
    """A monitor received a non-positive scale (delta, C0, r)."""


class QuadratureUnderflow(SimulationError):
    """Quadrature weights collapsed because of extreme geometry."""


# Basis -------------------------------------------------------------------


class SingularLift(SimulationError):
    """The biharmonic boundary system of a lifted mode is singular."""


class RankDeficiency(SimulationError):
    """Gram-Schmidt met a numerically dependent interior candidate."""


class CompatibilityViolation(SimulationError):
    """Initial data violate the compatibility conditions."""

    def __init__(self, message: str, violations: Optional[dict] = None):
        super().__init__(message, violations=violations or {})
        self.violations = violations or {}


class InvalidResolution(SimulationError):
    """Quadrature resolution too coarse for the basis."""


# Dynamics ----------------------------------------------------------------


class SingularMass(SimulationError):
    """Mass matrix could not be factorized."""


class InsufficientWindow(SimulationError):
    """Not enough (or non-uniform) states for a finite-difference window."""


class LedgerViolation(SimulationError):
    """Accumulated dissipation decreased between two steps."""


class ContactReached(SimulationError):
    """Minimum height dropped to the configured floor."""

    exit_code = 2


class PicardDivergence(SimulationError):
    """Picard sweeps did not converge within the iteration cap."""

    exit_code = 3


# Configuration / IO ------------------------------------------------------


class SchemaError(SimulationError):
    """Configuration failed validation."""

    exit_code = 4

    def __init__(self, message: str, field_path: Optional[str] = None):
        super().__init__(message, field_path=field_path)
        self.field_path = field_path


class VersionMismatch(SimulationError):
    """Checkpoint written by an incompatible format version."""

    exit_code = 4


EXIT_OK = 0
EXIT_FAILURE = 1


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(exc, SimulationError):
        return exc.exit_code
    return EXIT_FAILURE
