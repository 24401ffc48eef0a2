"""Galerkin operators of the first-order coupled weak form.

With test index k and trial index j the semi-discrete system reads

    M a' + (Dt + Bd + F_geo + S) a + C3(a, a) + K c = 0

where a are the modal velocities, c the beam coefficients (embedded at the
lifted positions) and

    M      = rho_f <h Phi_j, Phi_k> + rho_s <psi_j, psi_k>
    Dt     = rho_f <h dt(Phi_j), Phi_k>
    Bd     = 1/2 rho_f int dt_h psi_j psi_k
    F_geo  = -rho_f <dt_chi (B grad) Phi_j, Phi_k>
    S      = mu <A grad Phi_j : grad Phi_k>
    C3     = 1/2 rho_f <Phi_l (B grad) Phi_j, Phi_k> - 1/2 rho_f <Phi_l (B grad) Phi_k, Phi_j>
    K      = beta <psi_j', psi_k'> + alpha <psi_j'', psi_k''>

Geometry enters through g (coefficients c) and dt g (the lifted part of a).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.basis.basis_set import BasisSet
from src.core.errors import QuadratureUnderflow
from src.core.state import StateVector
from src.geometry.field import GeometryField
from src.geometry.transform import DEFAULT_H_FLOOR, TransformMatrices
from src.pipeline.config import PhysicsConfig

from .mapped import MappedModes, advect, combine, map_modes, pair, pair_grad, transport
from .quadrature import QuadratureGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AssemblyOptions:
    """``skew_sign`` multiplies the subtracted half of the convection split."""

    skew_sign: float = 1.0


DEFAULT_OPTIONS = AssemblyOptions()


@dataclass(frozen=True)
class GalerkinOperators:
    mass: np.ndarray
    mass_fluid: np.ndarray
    mass_beam: np.ndarray
    rate: np.ndarray
    boundary: np.ndarray
    geo: np.ndarray
    viscous: np.ndarray
    beam_stiffness: np.ndarray
    convection: Optional[np.ndarray]
    geometry: GeometryField

    @property
    def linear(self) -> np.ndarray:
        return self.rate + self.boundary + self.geo + self.viscous

    def convect(self, alpha: np.ndarray) -> np.ndarray:
        if self.convection is None:
            raise ValueError("operators were assembled without the convection tensor")
        return np.einsum("klj,l,j->k", self.convection, alpha, alpha)

    def forcing(self, alpha: np.ndarray, c_global: np.ndarray) -> np.ndarray:
        """Right-hand side F with M a' = F."""
        return -(self.linear @ alpha + self.convect(alpha) + self.beam_stiffness @ c_global)

    def residual(self, alpha_dot: np.ndarray, alpha: np.ndarray, c_global: np.ndarray) -> np.ndarray:
        return self.mass @ alpha_dot - self.forcing(alpha, c_global)


# ---------------------------------------------------------------------------
# Building blocks
# ---------------------------------------------------------------------------


def state_geometry(
    state: StateVector,
    basis: BasisSet,
    grid: QuadratureGrid,
    alpha_dot: Optional[np.ndarray] = None,
) -> GeometryField:
    """Geometry of g with dt g from alpha (and dtt g from alpha_dot)."""
    accel = None if alpha_dot is None else basis.beam_part(alpha_dot)
    return GeometryField.from_modes(
        grid.x,
        grid.z,
        basis.beam_tables(grid.x),
        state.g_mean,
        state.g_coeffs,
        rate=basis.beam_part(state.alpha),
        accel=accel,
    )


def check_weights(grid: QuadratureGrid, geometry: GeometryField) -> None:
    effective = grid.weights * geometry.h[:, None]
    tiny = np.finfo(float).tiny
    if not np.all(np.isfinite(effective)) or float(np.min(effective)) <= tiny:
        raise QuadratureUnderflow(
            f"quadrature weights collapsed (min h = {geometry.min_height():.3e})",
            min_height=geometry.min_height(),
        )


def beam_pair(rows: np.ndarray, weights: np.ndarray) -> np.ndarray:
    return np.einsum("kx,jx,x->kj", rows, rows, weights)


def skew(matrix_kj: np.ndarray, sign: float) -> np.ndarray:
    return matrix_kj - sign * matrix_kj.T


def advective_tensor(
    carriers: np.ndarray,
    B: np.ndarray,
    gradients: np.ndarray,
    tests: np.ndarray,
    weights: np.ndarray,
) -> np.ndarray:
    """T[k, l, j] = <carrier_l (B grad) field_j, test_k>."""
    n = carriers.shape[0]
    out = np.empty((tests.shape[0], n, gradients.shape[0]))
    for l in range(n):
        w = transport(carriers[l], B)
        out[:, l, :] = pair(tests, advect(w, gradients), weights)
    return out


def convection_matrix(
    advecting: np.ndarray,
    mapped: MappedModes,
    matrices: TransformMatrices,
    grid: QuadratureGrid,
    rho_f: float,
    options: AssemblyOptions = DEFAULT_OPTIONS,
) -> np.ndarray:
    """C3 contracted with a frozen advecting field u: C3(u, .) as a matrix."""
    w = transport(advecting, matrices.B)
    forward = pair(mapped.phi, advect(w, mapped.dphi), grid.weights)
    return 0.5 * rho_f * skew(forward, options.skew_sign)


# ---------------------------------------------------------------------------
# Assembly
# ---------------------------------------------------------------------------


def assemble_on_geometry(
    geometry: GeometryField,
    basis: BasisSet,
    grid: QuadratureGrid,
    physics: PhysicsConfig,
    options: AssemblyOptions = DEFAULT_OPTIONS,
    with_tensor: bool = True,
    h_floor: float = DEFAULT_H_FLOOR,
    mapped: Optional[MappedModes] = None,
) -> GalerkinOperators:
    """Operators of the first-order form for a given geometry."""
    geometry.check(h_floor)
    check_weights(grid, geometry)
    table = basis.tabulate(grid)
    matrices = geometry.matrices(h_floor)
    if mapped is None:
        mapped = map_modes(table, geometry, rates=True)

    rho_f = physics.rho_f
    h_weights = grid.weights * geometry.h[:, None]

    mass_fluid = rho_f * pair(mapped.phi, mapped.phi, h_weights)
    mass_beam = physics.rho_s * beam_pair(table.beam, grid.wx)
    rate = rho_f * pair(mapped.phi, mapped.phi_t, h_weights)
    boundary = 0.5 * rho_f * beam_pair(table.beam, grid.wx * geometry.dt_h)
    chi = transport(matrices.chi_dt, matrices.B)
    geo = -rho_f * pair(mapped.phi, advect(chi, mapped.dphi), grid.weights)
    viscous = physics.mu * pair_grad(mapped.dphi, mapped.dphi, matrices.A, grid.weights)
    beam_stiffness = physics.beta * beam_pair(table.beam_dx, grid.wx) + physics.alpha * beam_pair(
        table.beam_dxx, grid.wx
    )

    convection = None
    if with_tensor:
        forward = advective_tensor(mapped.phi, matrices.B, mapped.dphi, mapped.phi, grid.weights)
        convection = 0.5 * rho_f * (forward - options.skew_sign * np.transpose(forward, (2, 1, 0)))

    return GalerkinOperators(
        mass=mass_fluid + mass_beam,
        mass_fluid=mass_fluid,
        mass_beam=mass_beam,
        rate=rate,
        boundary=boundary,
        geo=geo,
        viscous=viscous,
        beam_stiffness=beam_stiffness,
        convection=convection,
        geometry=geometry,
    )


def assemble_first_order(
    state: StateVector,
    basis: BasisSet,
    grid: QuadratureGrid,
    physics: PhysicsConfig,
    options: AssemblyOptions = DEFAULT_OPTIONS,
    with_tensor: bool = True,
    h_floor: float = DEFAULT_H_FLOOR,
) -> GalerkinOperators:
    """Operators at ``state``: geometry g from its coefficients, dt g from alpha."""
    geometry = state_geometry(state, basis, grid)
    return assemble_on_geometry(geometry, basis, grid, physics, options, with_tensor, h_floor)


# ---------------------------------------------------------------------------
# Energy helpers
# ---------------------------------------------------------------------------


def fluid_velocity(alpha: np.ndarray, mapped: MappedModes) -> np.ndarray:
    return combine(alpha, mapped.phi)


def convective_power(alpha: np.ndarray, operators: GalerkinOperators) -> float:
    """alpha . (C3(alpha, alpha) + Bd alpha); equals 1/2 rho_f int (dt g)^3."""
    return float(alpha @ (operators.convect(alpha) + operators.boundary @ alpha))
