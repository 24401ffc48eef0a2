"""Initial acceleration alpha'(0) and the seed norms it determines."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from src.basis.basis_set import BasisSet
from src.core.errors import SingularMass
from src.core.state import StateVector
from src.geometry.transform import DEFAULT_H_FLOOR
from src.pipeline.config import PhysicsConfig

from .mapped import combine, map_modes
from .operators import DEFAULT_OPTIONS, AssemblyOptions, assemble_first_order
from .quadrature import QuadratureGrid

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class InitialAcceleration:
    alpha_dot: np.ndarray
    forcing: np.ndarray
    residual: float
    dt_u_norm: float
    dtt_g_norm: float

    def to_dict(self) -> dict:
        return {
            "alpha_dot": [float(v) for v in self.alpha_dot],
            "residual": self.residual,
            "dt_u_norm": self.dt_u_norm,
            "dtt_g_norm": self.dtt_g_norm,
        }


def initial_acceleration(
    state: StateVector,
    basis: BasisSet,
    grid: QuadratureGrid,
    physics: PhysicsConfig,
    options: AssemblyOptions = DEFAULT_OPTIONS,
    h_floor: float = DEFAULT_H_FLOOR,
) -> InitialAcceleration:
    """Solve M alpha'(0) = F(alpha(0), h0, h1).

    ``state`` carries alpha(0) (whose lifted part is the projection of h1)
    and the projection of h0. Returns the relative solver residual and the
    seed norms ||dt u_hat(0)||_{L2} and ||dtt h(0)||_{L2}.
    """
    operators = assemble_first_order(state, basis, grid, physics, options, True, h_floor)
    forcing = operators.forcing(state.alpha, basis.lift(state.g_coeffs))
    try:
        factor = scipy.linalg.cho_factor(operators.mass)
    except np.linalg.LinAlgError as exc:
        raise SingularMass("initial mass matrix is not positive definite") from exc
    alpha_dot = scipy.linalg.cho_solve(factor, forcing)

    scale = max(float(np.linalg.norm(forcing)), np.finfo(float).tiny)
    residual = float(np.linalg.norm(operators.mass @ alpha_dot - forcing)) / scale
    if not np.any(forcing):
        residual = 0.0

    modes = map_modes(basis.tabulate(grid), operators.geometry, rates=True)
    dt_u = combine(alpha_dot, modes.phi) + combine(state.alpha, modes.phi_t)
    dt_u_norm = math.sqrt(float(grid.integrate(np.sum(dt_u**2, axis=-1))))
    dtt_g_norm = float(np.linalg.norm(basis.beam_part(alpha_dot)))

    logger.info(
        "Initial acceleration: |dt u(0)| = %.4e, |dtt h(0)| = %.4e (solve residual %.1e)",
        dt_u_norm,
        dtt_g_norm,
        residual,
    )
    return InitialAcceleration(
        alpha_dot=alpha_dot,
        forcing=forcing,
        residual=residual,
        dt_u_norm=dt_u_norm,
        dtt_g_norm=dtt_g_norm,
    )
