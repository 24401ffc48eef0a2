"""Monitored a-priori norms of a (partial) trajectory."""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import TYPE_CHECKING, Any, Dict, List

import numpy as np
from scipy.integrate import trapezoid

from src.assembly.mapped import combine, map_modes
from src.assembly.operators import DEFAULT_OPTIONS, AssemblyOptions, state_geometry
from src.assembly.quadrature import QuadratureGrid
from src.assembly.tensors import first_order_acceleration
from src.basis.basis_set import BasisSet
from src.core.state import StateVector
from src.geometry.transform import DEFAULT_H_FLOOR
from src.pipeline.config import PhysicsConfig

if TYPE_CHECKING:
    from src.integrator.driver import Trajectory

logger = logging.getLogger(__name__)

UNMONITORED = (
    "u in L4(H^5/2) on the physical domain (needs a pressure solve)",
    "pressure norms (pressure eliminated by solenoidal test functions)",
)


@dataclass(frozen=True)
class NormBudget:
    """Sup-in-time and time-integrated norms of the monitored quantities.

    ``dtt_g_fd`` comes from finite differences of dt g over the stored
    times, ``dtt_g_dynamics`` from solving the first-order system at each
    stored state (``nan`` when not requested).
    """

    dt_u_Linf_L2: float
    grad_dt_u_L2_L2: float
    dtt_g_fd: float
    dtt_g_dynamics: float
    dt_g_Linf_H2: float
    u_Linf_H1: float
    min_height: float
    h_min: float
    ceiling: float
    blow_up: bool
    below_h_min: bool
    unmonitored: List[str] = field(default_factory=lambda: list(UNMONITORED))

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @property
    def monitored(self) -> Dict[str, float]:
        return {
            "dt_u_Linf_L2": self.dt_u_Linf_L2,
            "grad_dt_u_L2_L2": self.grad_dt_u_L2_L2,
            "dtt_g_fd": self.dtt_g_fd,
            "dtt_g_dynamics": self.dtt_g_dynamics,
            "dt_g_Linf_H2": self.dt_g_Linf_H2,
            "u_Linf_H1": self.u_Linf_H1,
        }


def _time_derivative(values: np.ndarray, times: np.ndarray) -> np.ndarray:
    if times.size < 2:
        return np.zeros_like(values)
    edge = 2 if times.size >= 3 else 1
    return np.gradient(values, times, axis=0, edge_order=edge)


def norm_budget(
    trajectory: "Trajectory",
    basis: BasisSet,
    grid: QuadratureGrid,
    physics: PhysicsConfig,
    h_min: float = DEFAULT_H_FLOOR,
    ceiling: float = 1e6,
    dynamics: bool = True,
    options: AssemblyOptions = DEFAULT_OPTIONS,
) -> NormBudget:
    """Evaluate the budget over the stored states of ``trajectory``."""
    times = np.asarray(trajectory.times, dtype=float)
    alphas = np.asarray(trajectory.alphas, dtype=float)
    coeffs = np.asarray(trajectory.coeffs, dtype=float)
    if times.size == 0:
        raise ValueError("norm budget needs at least one stored state")

    alpha_dot = _time_derivative(alphas, times)
    beam_rate = alphas[:, basis.lifted_positions]
    beam_accel = _time_derivative(beam_rate, times)
    h2 = basis.beam.h2_weights()

    table = basis.tabulate(grid)
    dt_u_sq = np.zeros(times.size)
    grad_dt_u_sq = np.zeros(times.size)
    u_h1 = np.zeros(times.size)
    dynamic_accel = np.full(times.size, np.nan)
    heights = np.zeros(times.size)

    for n, t in enumerate(times):
        state = StateVector(t=t, alpha=alphas[n], g_coeffs=coeffs[n], g_mean=trajectory.g_mean)
        geometry = state_geometry(state, basis, grid)
        heights[n] = geometry.min_height()
        modes = map_modes(table, geometry, rates=True)

        u = combine(alphas[n], modes.phi)
        du = combine(alphas[n], modes.dphi)
        dt_u = combine(alpha_dot[n], modes.phi) + combine(alphas[n], modes.phi_t)
        grad_dt_u = combine(alpha_dot[n], modes.dphi) + combine(alphas[n], modes.dphi_t)

        dt_u_sq[n] = grid.integrate(np.sum(dt_u**2, axis=-1))
        grad_dt_u_sq[n] = grid.integrate(np.sum(grad_dt_u**2, axis=(-2, -1)))
        u_h1[n] = math.sqrt(
            float(grid.integrate(np.sum(u**2, axis=-1) + np.sum(du**2, axis=(-2, -1))))
        )
        if dynamics:
            accel = first_order_acceleration(state, basis, grid, physics, options, h_min)
            dynamic_accel[n] = float(np.linalg.norm(basis.beam_part(accel)))

    grad_dt_u = math.sqrt(float(trapezoid(grad_dt_u_sq, times))) if times.size > 1 else 0.0
    dtt_g_dynamics = float(np.max(dynamic_accel)) if dynamics else math.nan

    values = {
        "dt_u_Linf_L2": math.sqrt(float(np.max(dt_u_sq))),
        "grad_dt_u_L2_L2": grad_dt_u,
        "dtt_g_fd": float(np.max(np.linalg.norm(beam_accel, axis=1))),
        "dtt_g_dynamics": dtt_g_dynamics,
        "dt_g_Linf_H2": math.sqrt(float(np.max(np.sum(beam_rate**2 * h2, axis=1)))),
        "u_Linf_H1": float(np.max(u_h1)),
    }
    checked = [v for k, v in values.items() if not (k == "dtt_g_dynamics" and not dynamics)]
    blow_up = any(not math.isfinite(v) or v > ceiling for v in checked)
    min_height = float(np.min(heights))
    if blow_up:
        logger.warning("Norm budget exceeds ceiling %.1e: %s", ceiling, values)

    return NormBudget(
        **values,
        min_height=min_height,
        h_min=h_min,
        ceiling=ceiling,
        blow_up=blow_up,
        below_h_min=min_height <= h_min,
    )

