"""Boundary and constraint residuals of a discrete state."""

from __future__ import annotations

import logging
from dataclasses import asdict, dataclass
from typing import Dict, Optional

import numpy as np

from src.assembly.mapped import apply_piola
from src.assembly.quadrature import QuadratureGrid
from src.basis.basis_set import BasisSet
from src.core.state import StateVector
from src.geometry.field import GeometryField

logger = logging.getLogger(__name__)

# Thresholds checked along every run.
LIMITS = {
    "beam_flux": 1e-12,
    "kinematic": 1e-10,
    "divergence": 1e-8,
    "no_slip": 1e-12,
}


@dataclass(frozen=True)
class CompatibilityReport:
    """Residuals of the constraints the basis builds in.

    ``beam_flux`` is |int dt g dx|, ``beam_accel_flux`` |int dtt g dx| (only
    when an acceleration was supplied), ``kinematic`` max |u(x,1) - dt g e2|,
    ``no_slip`` max |u(x,0)| and ``divergence`` max |div(B^T u)| over the
    quadrature nodes, relative to max(1, |B^T u|).
    """

    beam_flux: float
    kinematic: float
    divergence: float
    no_slip: float
    beam_accel_flux: float = 0.0

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)

    def violations(self, limits: Optional[Dict[str, float]] = None) -> Dict[str, float]:
        limits = LIMITS if limits is None else limits
        values = self.to_dict()
        return {name: values[name] for name, bound in limits.items() if values[name] > bound}


def compatibility_residuals(
    state: StateVector,
    basis: BasisSet,
    grid: QuadratureGrid,
    alpha_dot: Optional[np.ndarray] = None,
) -> CompatibilityReport:
    """Evaluate the constraint residuals of ``state`` on ``grid``."""
    alpha = state.alpha
    beam_weights = basis.beam.table(grid.x) @ grid.wx
    rate = basis.beam_part(alpha)
    beam_flux = abs(float(rate @ beam_weights))
    accel_flux = 0.0
    if alpha_dot is not None:
        accel_flux = abs(float(basis.beam_part(alpha_dot) @ beam_weights))

    # Traces at z = 0 and z = 1 through the Piola map of the current geometry.
    ends = np.array([0.0, 1.0])
    geometry = GeometryField.from_modes(
        grid.x, ends, basis.beam_tables(grid.x), state.g_mean, state.g_coeffs, rate=rate
    )
    psi, grad = basis.evaluate(grid.x, ends)
    P, dP = geometry.piola()
    phi, _ = apply_piola(P, dP, psi, grad)
    trace = np.tensordot(alpha, phi, axes=1)
    no_slip = float(np.max(np.abs(trace[:, 0, :])))
    top = trace[:, 1, :].copy()
    top[:, 1] -= geometry.dt_h
    kinematic = float(np.max(np.abs(top)))

    # B^T u = sum alpha Psi, so its divergence is the trace of the mode gradients.
    table = basis.tabulate(grid)
    v_grad = np.tensordot(alpha, table.grad, axes=1)
    v = np.tensordot(alpha, table.psi, axes=1)
    div = v_grad[..., 0, 0] + v_grad[..., 1, 1]
    scale = max(1.0, float(np.max(np.abs(v), initial=0.0)))
    divergence = float(np.max(np.abs(div))) / scale

    return CompatibilityReport(
        beam_flux=beam_flux,
        kinematic=kinematic,
        divergence=divergence,
        no_slip=no_slip,
        beam_accel_flux=accel_flux,
    )
