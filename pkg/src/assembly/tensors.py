"""Tensors of the time-differentiated Galerkin system.

    AA a'' + BB a' + CC a + DD(a', a) + EE(a, a) = 0

Matrices are stored [k, j] (test k) and 3-tensors [k, l, j] with
DD(a', a)_k = sum DD[k, l, j] a'_l a_j and EE(a, a)_k = sum EE[k, l, j] a_l a_j.
The tensors follow from differentiating the first-order form in time, so
the residual vanishes along exact first-order trajectories.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from src.basis.basis_set import BasisSet
from src.core.errors import SingularMass
from src.core.state import StateVector
from src.geometry.field import GeometryField
from src.geometry.transform import DEFAULT_H_FLOOR
from src.pipeline.config import PhysicsConfig

from .mapped import advect, map_modes, pair, pair_grad, transport
from .operators import (
    DEFAULT_OPTIONS,
    AssemblyOptions,
    advective_tensor,
    assemble_first_order,
    beam_pair,
    state_geometry,
)
from .quadrature import QuadratureGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DifferentiatedTensors:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    D: np.ndarray
    E: np.ndarray

    def residual(self, alpha_ddot: np.ndarray, alpha_dot: np.ndarray, alpha: np.ndarray) -> np.ndarray:
        return (
            self.A @ alpha_ddot
            + self.B @ alpha_dot
            + self.C @ alpha
            + np.einsum("klj,l,j->k", self.D, alpha_dot, alpha)
            + np.einsum("klj,l,j->k", self.E, alpha, alpha)
        )


def first_order_acceleration(
    state: StateVector,
    basis: BasisSet,
    grid: QuadratureGrid,
    physics: PhysicsConfig,
    options: AssemblyOptions = DEFAULT_OPTIONS,
    h_floor: float = DEFAULT_H_FLOOR,
) -> np.ndarray:
    """alpha' from the first-order dynamics, M alpha' = F."""
    operators = assemble_first_order(state, basis, grid, physics, options, True, h_floor)
    forcing = operators.forcing(state.alpha, basis.lift(state.g_coeffs))
    try:
        return scipy.linalg.cho_solve(scipy.linalg.cho_factor(operators.mass), forcing)
    except np.linalg.LinAlgError as exc:
        raise SingularMass("mass matrix is not positive definite") from exc


def assemble_differentiated_tensors(
    state: StateVector,
    basis: BasisSet,
    grid: QuadratureGrid,
    physics: PhysicsConfig,
    alpha_dot: Optional[np.ndarray] = None,
    geometry: Optional[GeometryField] = None,
    options: AssemblyOptions = DEFAULT_OPTIONS,
    h_floor: float = DEFAULT_H_FLOOR,
) -> DifferentiatedTensors:
    """Assemble AA..EE at ``state``.

    The geometry defaults to the coupled one (h = g with dt g, dtt g read
    from alpha and alpha_dot); ``alpha_dot`` defaults to the first-order
    acceleration. An explicit ``geometry`` gives the decoupled form with a
    prescribed h.
    """
    if geometry is None:
        if alpha_dot is None:
            alpha_dot = first_order_acceleration(state, basis, grid, physics, options, h_floor)
        geometry = state_geometry(state, basis, grid, alpha_dot)
    geometry.check(h_floor)

    table = basis.tabulate(grid)
    mats = geometry.matrices(h_floor)
    modes = map_modes(table, geometry, rates=True, accel=True)
    phi, dphi, phi_t, dphi_t, phi_tt = modes.phi, modes.dphi, modes.phi_t, modes.dphi_t, modes.phi_tt

    rho_f, mu = physics.rho_f, physics.mu
    W = grid.weights
    h = geometry.h[:, None]
    ht = geometry.dt_h[:, None]

    chi_w = transport(mats.chi_dt, mats.B)
    chi_dot_w = transport(mats.chi_dt, mats.dtB)
    chi_acc_w = transport(geometry.chi_ddot(), mats.B)
    chi_phi = advect(chi_w, dphi)

    A = rho_f * pair(phi, phi, W * h) + physics.rho_s * beam_pair(table.beam, grid.wx)

    B = (
        rho_f * pair(phi, phi, W * ht)
        + 2.0 * rho_f * pair(phi, phi_t, W * h)
        + rho_f * pair(phi_t, phi, W * h)
        - rho_f * pair(phi, chi_phi, W)
        + mu * pair_grad(dphi, dphi, mats.A, W)
        + 0.5 * rho_f * beam_pair(table.beam, grid.wx * geometry.dt_h)
    )

    C = (
        rho_f * pair(phi, phi_t, W * ht)
        + rho_f * pair(phi, phi_tt, W * h)
        + rho_f * pair(phi_t, phi_t, W * h)
        - rho_f * pair(phi, advect(chi_acc_w, dphi), W)
        - rho_f * pair(phi, advect(chi_dot_w, dphi), W)
        - rho_f * pair(phi, advect(chi_w, dphi_t), W)
        - rho_f * pair(phi_t, chi_phi, W)
        + mu * pair_grad(dphi, dphi, mats.dtA, W)
        + mu * pair_grad(dphi, dphi_t, mats.A, W)
        + mu * pair_grad(dphi_t, dphi, mats.A, W)
        + physics.beta * beam_pair(table.beam_dx, grid.wx)
        + physics.alpha * beam_pair(table.beam_dxx, grid.wx)
        + 0.5 * rho_f * beam_pair(table.beam, grid.wx * geometry.dtt_h)
    )

    s = options.skew_sign
    # G1[a, b, c] = <Phi_b (B grad) Phi_c, Phi_a>
    G1 = advective_tensor(phi, mats.B, dphi, phi, W)
    D = 0.5 * rho_f * (
        G1
        + np.transpose(G1, (0, 2, 1))
        - s * np.transpose(G1, (2, 1, 0))
        - s * np.transpose(G1, (2, 0, 1))
    )

    H1 = advective_tensor(phi_t, mats.B, dphi, phi, W)
    H2 = advective_tensor(phi, mats.dtB, dphi, phi, W)
    H3 = advective_tensor(phi, mats.B, dphi_t, phi, W)
    H4 = advective_tensor(phi, mats.B, dphi, phi_t, W)
    forward = H1 + np.transpose(H2 + H3 + H4, (0, 2, 1))
    backward = np.transpose(H1, (2, 1, 0)) + np.transpose(H2 + H3 + H4, (2, 0, 1))
    E = 0.5 * rho_f * (forward - s * backward)

    return DifferentiatedTensors(A=A, B=B, C=C, D=D, E=E)
