"""Core types shared by every simulator layer."""

from .errors import (
    CompatibilityViolation,
    ContactReached,
    InsufficientWindow,
    LedgerViolation,
    InvalidResolution,
    NonPositiveHeight,
    NonPositiveInput,
    PicardDivergence,
    QuadratureUnderflow,
    RankDeficiency,
    SchemaError,
    SimulationError,
    SingularLift,
    SingularMass,
    VersionMismatch,
    exit_code_for,
)
from .state import StateVector, StepReport

__all__ = [
    'SimulationError', 'NonPositiveHeight', 'NonPositiveInput', 'QuadratureUnderflow',
    'SingularLift', 'RankDeficiency', 'CompatibilityViolation', 'InvalidResolution',
    'SingularMass', 'InsufficientWindow', 'LedgerViolation', 'ContactReached', 'PicardDivergence',
    'SchemaError', 'VersionMismatch', 'exit_code_for', 'StateVector', 'StepReport',
]
