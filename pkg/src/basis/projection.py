"""Projection of initial data onto the coupled basis."""

from __future__ import annotations

import logging
from typing import TYPE_CHECKING, Callable, Dict, Optional

import numpy as np

from src.core.errors import CompatibilityViolation
from src.geometry.field import GeometryField
from src.geometry.transform import DEFAULT_H_FLOOR

from .basis_set import BasisSet
from .beam import HeightData, project_initial_beam, sample_height

if TYPE_CHECKING:
    from src.assembly.quadrature import QuadratureGrid

logger = logging.getLogger(__name__)

VelocityField = Callable[[np.ndarray, np.ndarray], np.ndarray]

DEFAULT_COMPAT_TOL = 1e-6


def initial_geometry(basis: BasisSet, grid: "QuadratureGrid", mean: float, coeffs: np.ndarray) -> GeometryField:
    return GeometryField.from_modes(grid.x, grid.z, basis.beam_tables(grid.x), mean, coeffs)


def sample_velocity(u0_hat: VelocityField, grid: "QuadratureGrid") -> np.ndarray:
    X, Z = np.meshgrid(grid.x, grid.z, indexing="ij")
    values = np.asarray(u0_hat(X, Z), dtype=float)
    if values.shape != X.shape + (2,):
        values = np.moveaxis(values, 0, -1)
    return values


def check_initial_compatibility(
    u0_hat: Optional[VelocityField],
    h0: HeightData,
    h1: HeightData,
    basis: BasisSet,
    grid: "QuadratureGrid",
    tol: float = DEFAULT_COMPAT_TOL,
    h_floor: float = DEFAULT_H_FLOOR,
) -> Dict[str, float]:
    """Residuals of the initial compatibility conditions.

    Keys: min_height, mean_h1, no_slip, kinematic, divergence. Raises
    CompatibilityViolation naming every condition beyond ``tol``.
    """
    x = basis.beam.fine_grid()
    h0_values = sample_height(h0, x)
    h1_values = sample_height(h1, x)
    report = {
        "min_height": float(np.min(h0_values)),
        "mean_h1": abs(float(np.mean(h1_values))) * basis.length,
        "no_slip": 0.0,
        "kinematic": 0.0,
        "divergence": 0.0,
    }

    if u0_hat is not None:
        ends = np.array([0.0, 1.0])
        X, Z = np.meshgrid(grid.x, ends, indexing="ij")
        trace = np.asarray(u0_hat(X, Z), dtype=float)
        if trace.shape != X.shape + (2,):
            trace = np.moveaxis(trace, 0, -1)
        top = sample_height(h1, grid.x)
        report["no_slip"] = float(np.max(np.abs(trace[:, 0, :])))
        report["kinematic"] = float(
            max(np.max(np.abs(trace[:, 1, 0])), np.max(np.abs(trace[:, 1, 1] - top)))
        )

        mean, coeffs = project_initial_beam(h0, basis.beam)
        geometry = initial_geometry(basis, grid, mean, coeffs)
        B = geometry.matrices(h_floor).B
        v0 = np.einsum("xzji,xzj->xzi", B, sample_velocity(u0_hat, grid))
        div = grid.dx(v0[..., 0], axis=0) + grid.dz(v0[..., 1], axis=1)
        scale = max(1.0, float(np.max(np.abs(v0))))
        report["divergence"] = float(np.max(np.abs(div))) / scale

    violations = {}
    if report["min_height"] <= h_floor:
        violations["min_height"] = report["min_height"]
    for name in ("mean_h1", "no_slip", "kinematic", "divergence"):
        if report[name] > tol:
            violations[name] = report[name]
    if violations:
        names = ", ".join(f"{k}={v:.3e}" for k, v in violations.items())
        raise CompatibilityViolation(f"initial data incompatible: {names}", violations)
    return report


def project_initial_fluid(
    u0_hat: Optional[VelocityField],
    h0: HeightData,
    h1: HeightData,
    basis: BasisSet,
    grid: "QuadratureGrid",
    pairing: str = "l2",
    tol: float = DEFAULT_COMPAT_TOL,
    h_floor: float = DEFAULT_H_FLOOR,
) -> np.ndarray:
    """alpha(0): lifted part from h1, interior part from B_{h0}^T u0_hat.

    ``u0_hat=None`` stands for the Stokes lift of h1 (no interior flow).
    The interior coefficients are V1 pairings of the remainder
    w = B^T u0_hat - sum_k P^k(h1) Psi_k, evaluated as -<Lap Psi_k, w>
    since w vanishes on z = 0 and z = 1.
    """
    check_initial_compatibility(u0_hat, h0, h1, basis, grid, tol, h_floor)

    _, h1_coeffs = project_initial_beam(h1, basis.beam, pairing)
    alpha = basis.lift(h1_coeffs)
    if u0_hat is None:
        return alpha

    mean, coeffs = project_initial_beam(h0, basis.beam, pairing)
    geometry = initial_geometry(basis, grid, mean, coeffs)
    B = geometry.matrices(h_floor).B
    v0 = np.einsum("xzji,xzj->xzi", B, sample_velocity(u0_hat, grid))

    table = basis.tabulate(grid)
    remainder = v0 - np.einsum("k,kxzi->xzi", alpha, table.psi)
    for p in basis.interior_positions:
        laplacian = basis.modes[p].laplacian(grid.x, grid.z)
        alpha[p] = -grid.integrate(np.sum(laplacian * remainder, axis=-1))
    logger.debug("Projected initial fluid data: |alpha(0)| = %.3e", float(np.linalg.norm(alpha)))
    return alpha
