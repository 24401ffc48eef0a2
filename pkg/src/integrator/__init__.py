"""Time integration of the coupled system."""

from .driver import RunObserver, RunResult, Simulation, Trajectory, prepare, run
from .residual import ResidualSeries, differentiated_residual
from .stepper import Assembler, StepScheme, step

__all__ = [
    "Assembler",
    "StepScheme",
    "step",
    "Simulation",
    "Trajectory",
    "RunObserver",
    "RunResult",
    "prepare",
    "run",
    "ResidualSeries",
    "differentiated_residual",
]
