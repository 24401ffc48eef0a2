"""Implicit-midpoint step of the coupled first-order system.

Each Picard sweep freezes the geometry (g and dt g) and the advecting
velocity at the current midpoint iterate, then solves the resulting
linear midpoint system exactly:

    [2M/dt + L + C3(u_m, .) + dt/2 K Pi] a_m = 2M a_n / dt - K c_n

with a_{n+1} = 2 a_m - a_n and c_{n+1} = c_n + dt a_m[lifted]. The fixed
point of the sweep map is the implicit-midpoint solution.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
import scipy.linalg

from src.assembly.mapped import combine, map_modes
from src.assembly.operators import (
    DEFAULT_OPTIONS,
    AssemblyOptions,
    GalerkinOperators,
    assemble_on_geometry,
    convection_matrix,
)
from src.assembly.quadrature import QuadratureGrid
from src.basis.basis_set import BasisSet
from src.core.errors import ContactReached, NonPositiveHeight, PicardDivergence, QuadratureUnderflow
from src.core.state import StateVector, StepReport
from src.geometry.field import GeometryField
from src.pipeline.config import PhysicsConfig, TimeConfig

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class StepScheme:
    """Picard and step-size controls."""

    tol: float = 1e-10
    max_iter: int = 25
    h_floor: float = 1e-6
    dt_halving: bool = False
    dt_min: float = 1e-6

    @classmethod
    def from_config(cls, time: TimeConfig) -> "StepScheme":
        return cls(
            tol=time.picard_tol,
            max_iter=time.picard_max_iter,
            h_floor=time.h_floor,
            dt_halving=time.dt_halving,
            dt_min=time.dt_min,
        )


@dataclass
class Assembler:
    """Binds basis, grid and material so operators can be built per geometry."""

    basis: BasisSet
    grid: QuadratureGrid
    physics: PhysicsConfig
    options: AssemblyOptions = field(default=DEFAULT_OPTIONS)

    def __post_init__(self) -> None:
        self.table = self.basis.tabulate(self.grid)
        self.beam_tables = self.basis.beam_tables(self.grid.x)
        self.fine_x = self.basis.beam.fine_grid()
        self.fine_tables = self.basis.beam.table(self.fine_x)
        self.lifted_projector = np.diag(self.basis.is_lifted.astype(float))

    def geometry(self, mean: float, coeffs: np.ndarray, rate: np.ndarray) -> GeometryField:
        return GeometryField.from_modes(self.grid.x, self.grid.z, self.beam_tables, mean, coeffs, rate=rate)

    def operators(self, geometry: GeometryField, h_floor: float, with_tensor: bool = False) -> GalerkinOperators:
        return assemble_on_geometry(
            geometry, self.basis, self.grid, self.physics, self.options, with_tensor, h_floor
        )

    def state_operators(self, state: StateVector, h_floor: float) -> GalerkinOperators:
        geometry = self.geometry(state.g_mean, state.g_coeffs, self.basis.beam_part(state.alpha))
        return self.operators(geometry, h_floor)

    def min_height(self, mean: float, coeffs: np.ndarray) -> float:
        """Minimum of g on the fine uniform grid."""
        return float(np.min(mean + np.asarray(coeffs) @ self.fine_tables))


def _sweep(
    state: StateVector,
    guess_alpha: np.ndarray,
    guess_coeffs: np.ndarray,
    assembler: Assembler,
    dt: float,
    h_floor: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, GalerkinOperators]:
    basis = assembler.basis
    alpha_mid = 0.5 * (state.alpha + guess_alpha)
    coeffs_mid = 0.5 * (state.g_coeffs + guess_coeffs)
    geometry = assembler.geometry(state.g_mean, coeffs_mid, basis.beam_part(alpha_mid))
    ops = assembler.operators(geometry, h_floor)

    mapped = map_modes(assembler.table, geometry, rates=False)
    advecting = combine(alpha_mid, mapped.phi)
    matrices = geometry.matrices(h_floor)
    convection = convection_matrix(
        advecting, mapped, matrices, assembler.grid, assembler.physics.rho_f, assembler.options
    )

    c_global = basis.lift(state.g_coeffs)
    system = (
        2.0 / dt * ops.mass
        + ops.linear
        + convection
        + 0.5 * dt * ops.beam_stiffness @ assembler.lifted_projector
    )
    rhs = 2.0 / dt * ops.mass @ state.alpha - ops.beam_stiffness @ c_global
    try:
        new_mid = scipy.linalg.solve(system, rhs)
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise PicardDivergence(f"midpoint system singular: {exc}") from exc

    new_alpha = 2.0 * new_mid - state.alpha
    new_coeffs = state.g_coeffs + dt * basis.beam_part(new_mid)
    return new_alpha, new_coeffs, new_mid, ops


def _single_step(
    state: StateVector, assembler: Assembler, dt: float, scheme: StepScheme
) -> Tuple[StateVector, StepReport]:
    guess_alpha = np.array(state.alpha)
    guess_coeffs = np.array(state.g_coeffs)
    residual = np.inf
    for iteration in range(1, scheme.max_iter + 1):
        try:
            new_alpha, new_coeffs, alpha_mid, ops = _sweep(
                state, guess_alpha, guess_coeffs, assembler, dt, scheme.h_floor
            )
        except (NonPositiveHeight, QuadratureUnderflow) as exc:
            raise ContactReached(f"contact during Picard sweep at t={state.t:.6g}: {exc}") from exc

        scale = max(1.0, float(np.max(np.abs(new_alpha), initial=0.0)), float(np.max(np.abs(new_coeffs), initial=0.0)))
        change = max(
            float(np.max(np.abs(new_alpha - guess_alpha), initial=0.0)),
            float(np.max(np.abs(new_coeffs - guess_coeffs), initial=0.0)),
        )
        residual = change / scale
        guess_alpha, guess_coeffs = new_alpha, new_coeffs
        logger.debug("t=%.6g sweep %d residual %.3e", state.t, iteration, residual)
        if not np.isfinite(residual):
            break
        if residual <= scheme.tol:
            dissipation = dt * float(alpha_mid @ ops.viscous @ alpha_mid)
            min_height = assembler.min_height(state.g_mean, new_coeffs)
            new_state = state.replace(t=state.t + dt, alpha=new_alpha, g_coeffs=new_coeffs)
            if min_height <= scheme.h_floor:
                raise ContactReached(
                    f"minimum height {min_height:.3e} reached floor at t={new_state.t:.6g}",
                    time=new_state.t,
                    min_height=min_height,
                )
            report = StepReport(
                picard_iterations=iteration,
                picard_residual=residual,
                dt=dt,
                min_height=min_height,
                dissipation=dissipation,
            )
            return new_state, report

    raise PicardDivergence(
        f"Picard residual {residual:.3e} above {scheme.tol:.1e} after {scheme.max_iter} sweeps "
        f"(t={state.t:.6g}, dt={dt:.3e})",
        residual=residual,
        dt=dt,
    )


def step(
    state: StateVector, assembler: Assembler, dt: float, scheme: StepScheme
) -> Tuple[StateVector, StepReport]:
    """Advance by dt; on Picard failure optionally retry as two half steps."""
    try:
        return _single_step(state, assembler, dt, scheme)
    except PicardDivergence:
        half = 0.5 * dt
        if not scheme.dt_halving or half < scheme.dt_min:
            raise
        logger.warning("Picard failed at t=%.6g with dt=%.3e; halving", state.t, dt)

    mid_state, first = step(state, assembler, half, scheme)
    end_state, second = step(mid_state, assembler, half, scheme)
    # keep the nominal time grid free of rounding drift
    end_state = end_state.replace(t=state.t + dt)
    report = StepReport(
        picard_iterations=first.picard_iterations + second.picard_iterations,
        picard_residual=max(first.picard_residual, second.picard_residual),
        dt=min(first.dt, second.dt),
        min_height=min(first.min_height, second.min_height),
        dissipation=first.dissipation + second.dissipation,
        halvings=1 + max(first.halvings, second.halvings),
    )
    return end_state, report
