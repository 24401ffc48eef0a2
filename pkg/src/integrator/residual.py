"""Consistency of a stored trajectory with the time-differentiated system.

Central differences over three consecutive stored states give alpha' and
alpha'' at the middle one; inserting them into AA a'' + BB a' + CC a +
DD(a', a) + EE(a, a) measures how far the integrated first-order dynamics
are from the differentiated ones.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from src.assembly.operators import DEFAULT_OPTIONS, AssemblyOptions
from src.assembly.quadrature import QuadratureGrid
from src.assembly.tensors import assemble_differentiated_tensors
from src.basis.basis_set import BasisSet
from src.geometry.transform import DEFAULT_H_FLOOR
from src.pipeline.config import PhysicsConfig

from .driver import Trajectory

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ResidualSeries:
    times: np.ndarray
    norms: np.ndarray
    spacing: float

    @property
    def max(self) -> float:
        return float(np.max(self.norms)) if self.norms.size else 0.0


def differentiated_residual(
    trajectory: Trajectory,
    basis: BasisSet,
    grid: QuadratureGrid,
    physics: PhysicsConfig,
    options: AssemblyOptions = DEFAULT_OPTIONS,
    h_floor: float = DEFAULT_H_FLOOR,
) -> ResidualSeries:
    """Residual norm at every interior stored state of ``trajectory``."""
    spacing = trajectory.uniform_dt()
    alphas = trajectory.alphas
    times = trajectory.times

    norms = np.zeros(len(trajectory) - 2)
    for n in range(1, len(trajectory) - 1):
        alpha_dot = (alphas[n + 1] - alphas[n - 1]) / (2.0 * spacing)
        alpha_ddot = (alphas[n + 1] - 2.0 * alphas[n] + alphas[n - 1]) / spacing**2
        state = trajectory.states[n]
        tensors = assemble_differentiated_tensors(
            state, basis, grid, physics, alpha_dot=alpha_dot, options=options, h_floor=h_floor
        )
        norms[n - 1] = float(np.linalg.norm(tensors.residual(alpha_ddot, alpha_dot, state.alpha)))
        logger.debug("t=%.6g differentiated residual %.3e", state.t, norms[n - 1])

    return ResidualSeries(times=times[1:-1], norms=norms, spacing=spacing)
