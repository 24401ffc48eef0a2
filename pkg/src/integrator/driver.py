"""Run driver: builds the discretisation from a config and integrates it."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Protocol

import numpy as np
from tqdm import tqdm

from src.assembly.initial import InitialAcceleration, initial_acceleration
from src.assembly.operators import DEFAULT_OPTIONS, AssemblyOptions
from src.assembly.quadrature import QuadratureGrid, build_quadrature
from src.basis.basis_set import BasisSet, build_basis_set
from src.basis.beam import project_initial_beam, sample_height
from src.basis.cache import BasisCache
from src.basis.projection import project_initial_fluid
from src.core.errors import ContactReached, InsufficientWindow, SimulationError
from src.core.state import StateVector, StepReport
from src.diagnostics.compatibility import CompatibilityReport, compatibility_residuals
from src.diagnostics.energy import EnergyLedger, compute_C0, ledger_update
from src.geometry.monitors import contact_bound
from src.pipeline.config import SimConfig
from src.scenarios import InitialData, resolve_initial

from .stepper import Assembler, StepScheme, step

logger = logging.getLogger(__name__)


class RunObserver(Protocol):
    """Receives output rows and checkpoints while a run progresses."""

    def on_output(
        self,
        step: int,
        state: StateVector,
        ledger: EnergyLedger,
        report: Optional[StepReport],
        min_height: float,
    ) -> None:
        """Called for every stored state."""

    def on_checkpoint(self, step: int, state: StateVector, ledger: EnergyLedger) -> None:
        """Called every ``output.checkpoint_every`` steps."""


# ---------------------------------------------------------------------------
# Trajectory
# ---------------------------------------------------------------------------


@dataclass
class Trajectory:
    """Stored states of a run with their ledger rows and reports."""

    g_mean: float
    steps: List[int] = field(default_factory=list)
    states: List[StateVector] = field(default_factory=list)
    ledger: List[EnergyLedger] = field(default_factory=list)
    reports: List[Optional[StepReport]] = field(default_factory=list)
    compatibility: List[CompatibilityReport] = field(default_factory=list)
    min_heights: List[float] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.states)

    def append(
        self,
        step_index: int,
        state: StateVector,
        ledger: EnergyLedger,
        report: Optional[StepReport],
        compatibility: CompatibilityReport,
        min_height: float,
    ) -> None:
        self.steps.append(step_index)
        self.states.append(state)
        self.ledger.append(ledger)
        self.reports.append(report)
        self.compatibility.append(compatibility)
        self.min_heights.append(min_height)

    @property
    def times(self) -> np.ndarray:
        return np.array([state.t for state in self.states])

    @property
    def alphas(self) -> np.ndarray:
        return np.stack([state.alpha for state in self.states])

    @property
    def coeffs(self) -> np.ndarray:
        return np.stack([state.g_coeffs for state in self.states])

    @property
    def final(self) -> StateVector:
        return self.states[-1]

    def window(self, start: int = 0, stop: Optional[int] = None) -> "Trajectory":
        picked = slice(start, stop)
        return Trajectory(
            g_mean=self.g_mean,
            steps=self.steps[picked],
            states=self.states[picked],
            ledger=self.ledger[picked],
            reports=self.reports[picked],
            compatibility=self.compatibility[picked],
            min_heights=self.min_heights[picked],
        )

    def uniform_dt(self, rtol: float = 1e-9) -> float:
        """Spacing of the stored times; InsufficientWindow unless uniform."""
        times = self.times
        if times.size < 3:
            raise InsufficientWindow(f"need at least 3 stored states, have {times.size}")
        gaps = np.diff(times)
        spacing = float(np.mean(gaps))
        if spacing <= 0.0 or np.max(np.abs(gaps - spacing)) > rtol * spacing:
            raise InsufficientWindow("stored states are not uniformly spaced in time")
        return spacing


# ---------------------------------------------------------------------------
# Setup
# ---------------------------------------------------------------------------


@dataclass
class Simulation:
    """Everything a run needs besides the time loop."""

    config: SimConfig
    basis: BasisSet
    grid: QuadratureGrid
    assembler: Assembler
    scheme: StepScheme
    initial: InitialData
    state0: StateVector
    C0: float
    delta: float
    acceleration: InitialAcceleration

    @property
    def contact_bound(self) -> float:
        """Earliest possible time of a floor crossing."""
        margin = self.delta - self.config.time.h_floor
        if margin <= 0.0:
            return 0.0
        return contact_bound(margin, self.C0)


def prepare(
    config: SimConfig,
    options: AssemblyOptions = DEFAULT_OPTIONS,
    initial: Optional[InitialData] = None,
) -> Simulation:
    """Resolve initial data, build basis and quadrature, project the data."""
    physics, disc, time = config.physics, config.discretization, config.time
    data = initial if initial is not None else resolve_initial(config.initial, physics.length)

    cache = BasisCache(config.cache) if config.cache is not None else None
    try:
        basis = build_basis_set(
            physics.length,
            disc.n_pairs,
            disc.interior_wavenumbers,
            disc.interior_profiles,
            cache,
        )
    finally:
        if cache is not None:
            cache.close()

    n_x, n_z = disc.grid_sizes(basis.max_wavenumber, basis.max_z_degree, physics.length)
    grid = build_quadrature(physics.length, n_x, n_z, basis.max_wavenumber, basis.max_z_degree)
    logger.info("Quadrature grid: n_x=%d, n_z=%d", n_x, n_z)

    mean, coeffs = project_initial_beam(data.h0, basis.beam, disc.beam_projection)
    alpha0 = project_initial_fluid(
        data.u0_hat,
        data.h0,
        data.h1,
        basis,
        grid,
        disc.beam_projection,
        disc.compat_tol,
        time.h_floor,
    )
    state0 = StateVector(t=0.0, alpha=alpha0, g_coeffs=coeffs, g_mean=mean)

    C0 = compute_C0(data.u0_hat, data.h0, data.h1, basis, grid, time.h_floor)
    delta = float(np.min(sample_height(data.h0, basis.beam.fine_grid())))
    acceleration = initial_acceleration(state0, basis, grid, physics, options, time.h_floor)

    return Simulation(
        config=config,
        basis=basis,
        grid=grid,
        assembler=Assembler(basis, grid, physics, options),
        scheme=StepScheme.from_config(time),
        initial=data,
        state0=state0,
        C0=C0,
        delta=delta,
        acceleration=acceleration,
    )


# ---------------------------------------------------------------------------
# Time loop
# ---------------------------------------------------------------------------


@dataclass
class RunResult:
    simulation: Simulation
    trajectory: Trajectory
    steps_taken: int
    status: str = "completed"
    contact: Optional[ContactReached] = None
    contact_time: Optional[float] = None
    final_state: Optional[StateVector] = None
    final_ledger: Optional[EnergyLedger] = None

    def summary(self) -> Dict[str, Any]:
        sim = self.simulation
        reports = [r for r in self.trajectory.reports if r is not None]
        residuals = [abs(row.balance_residual) for row in self.trajectory.ledger]
        return {
            "status": self.status,
            "steps": self.steps_taken,
            "t_final": None if self.final_state is None else self.final_state.t,
            "contact_time": self.contact_time,
            "contact_bound": sim.contact_bound,
            "C0": sim.C0,
            "delta": sim.delta,
            "initial_acceleration": sim.acceleration.to_dict(),
            "basis": sim.basis.describe(),
            "grid": {"n_x": sim.grid.n_x, "n_z": sim.grid.n_z},
            "max_picard_iterations": max((r.picard_iterations for r in reports), default=0),
            "max_halvings": max((r.halvings for r in reports), default=0),
            "max_balance_residual": max(residuals, default=0.0),
            "min_height": min(self.trajectory.min_heights, default=math.nan),
        }


def _store(
    trajectory: Trajectory,
    observer: Optional[RunObserver],
    sim: Simulation,
    step_index: int,
    state: StateVector,
    ledger: EnergyLedger,
    report: Optional[StepReport],
) -> None:
    compatibility = compatibility_residuals(state, sim.basis, sim.grid)
    violations = compatibility.violations()
    if violations:
        logger.warning("Constraint residuals above limits at t=%.6g: %s", state.t, violations)
    min_height = sim.assembler.min_height(state.g_mean, state.g_coeffs)
    trajectory.append(step_index, state, ledger, report, compatibility, min_height)
    if observer is not None:
        observer.on_output(step_index, state, ledger, report, min_height)


def run(
    config: SimConfig,
    simulation: Optional[Simulation] = None,
    resume: Optional[Any] = None,
    observer: Optional[RunObserver] = None,
    progress: bool = True,
    options: AssemblyOptions = DEFAULT_OPTIONS,
) -> RunResult:
    """Integrate from the initial data (or a checkpoint) to ``time.t_end``.

    ``resume`` is a checkpoint carrying ``step``, ``state`` and ``ledger``.
    Contact ends the run early with ``status='contact'``; other step errors
    propagate annotated with the step index and the last accepted state.
    """
    sim = simulation if simulation is not None else prepare(config, options)
    time, output = config.time, config.output
    h_floor = time.h_floor
    every = config.output_every
    n_steps = time.n_steps

    trajectory = Trajectory(g_mean=sim.state0.g_mean)
    if resume is not None:
        start, state, ledger = resume.step, resume.state, resume.ledger
        trajectory.g_mean = state.g_mean
        logger.info("Resuming at step %d (t=%.6g)", start, state.t)
    else:
        start, state = 0, sim.state0
        operators = sim.assembler.state_operators(state, h_floor)
        ledger = ledger_update(None, state, operators, sim.basis, config.physics, step=0)
        _store(trajectory, observer, sim, 0, state, ledger, None)

    result = RunResult(simulation=sim, trajectory=trajectory, steps_taken=start)
    logger.info("Integrating %d steps of dt=%.3e (outputs every %d)", n_steps - start, time.dt, every)

    bar = tqdm(total=n_steps, initial=start, desc="time steps", unit="step", disable=not progress)
    try:
        for step_index in range(start + 1, n_steps + 1):
            try:
                new_state, report = step(state, sim.assembler, time.dt, sim.scheme)
                operators = sim.assembler.state_operators(new_state, h_floor)
                new_ledger = ledger_update(
                    ledger, new_state, operators, sim.basis, config.physics, report.dissipation, step_index
                )
            except ContactReached as exc:
                exc.annotate(step_index - 1, state)
                result.status = "contact"
                result.contact = exc
                result.contact_time = exc.details.get("time", state.t + time.dt)
                logger.info("Contact reached near t=%.6g: %s", result.contact_time, exc)
                break
            except SimulationError as exc:
                raise exc.annotate(step_index - 1, state)

            report = replace(
                report,
                energy_residual=new_ledger.E_total + report.dissipation - ledger.E_total,
            )
            state, ledger = new_state, new_ledger
            result.steps_taken = step_index
            bar.update(1)

            if step_index % every == 0:
                _store(trajectory, observer, sim, step_index, state, ledger, report)
            if observer is not None and output.checkpoint_every and step_index % output.checkpoint_every == 0:
                observer.on_checkpoint(step_index, state, ledger)
    finally:
        bar.close()

    result.final_state, result.final_ledger = state, ledger
    logger.info("Run %s after %d steps (t=%.6g)", result.status, result.steps_taken, state.t)
    return result
