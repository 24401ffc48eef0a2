"""Initial-data constant C0 and the per-step energy ledger.

The ledger tracks

    E_tot = 1/2 rho_f <h u, u> + 1/2 rho_s |dt g|^2 + 1/2 beta |dx g|^2 + 1/2 alpha |dxx g|^2

together with the accumulated viscous dissipation. Along exact solutions
E_tot(t) + dissipation(t) = E_tot(0); ``balance_residual`` is the defect
of that identity.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from src.assembly.mapped import combine, map_modes
from src.assembly.operators import GalerkinOperators
from src.assembly.quadrature import QuadratureGrid
from src.basis.basis_set import BasisSet
from src.basis.beam import HeightData, project_initial_beam
from src.basis.projection import VelocityField, initial_geometry, sample_velocity
from src.core.errors import LedgerViolation
from src.core.state import StateVector
from src.geometry.transform import DEFAULT_H_FLOOR
from src.pipeline.config import PhysicsConfig

logger = logging.getLogger(__name__)

# Roundoff allowance for a negative dissipation increment, relative to E_tot.
DISSIPATION_SLACK = 1e-14


def compute_C0(
    u0_hat: Optional[VelocityField],
    h0: HeightData,
    h1: HeightData,
    basis: BasisSet,
    grid: QuadratureGrid,
    h_floor: float = DEFAULT_H_FLOOR,
) -> float:
    """||h1||^2_{L2} + ||h0||^2_{H2} + ||u0_hat||^2_{L2(reference strip)}.

    Beam norms are evaluated spectrally from the L2 projections. A missing
    ``u0_hat`` stands for the Stokes lift of h1, evaluated through the
    lifted modes on the h0 geometry.
    """
    mean0, coeffs0 = project_initial_beam(h0, basis.beam)
    mean1, coeffs1 = project_initial_beam(h1, basis.beam)
    h1_sq = basis.length * mean1**2 + float(np.sum(coeffs1**2))
    h0_sq = basis.beam.h2_norm_sq(coeffs0, mean0)

    if u0_hat is None:
        if not np.any(coeffs1):
            u_sq = 0.0
        else:
            geometry = initial_geometry(basis, grid, mean0, coeffs0)
            geometry.check(h_floor)
            phi = map_modes(basis.tabulate(grid), geometry, rates=False).phi
            u = combine(basis.lift(coeffs1), phi)
            u_sq = float(grid.integrate(np.sum(u**2, axis=-1)))
    else:
        u = sample_velocity(u0_hat, grid)
        u_sq = float(grid.integrate(np.sum(u**2, axis=-1)))

    C0 = h1_sq + h0_sq + u_sq
    logger.debug("C0 = %.6e (h1 %.3e, h0 %.3e, u0 %.3e)", C0, h1_sq, h0_sq, u_sq)
    return C0


@dataclass(frozen=True)
class EnergyLedger:
    """One row of the energy accounting, after ``step`` steps."""

    step: int
    t: float
    E_kinetic_fluid: float
    E_kinetic_beam: float
    E_elastic: float
    E_total: float
    E_initial: float
    dissipation_cum: float
    balance_residual: float

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "EnergyLedger":
        return cls(
            step=int(data["step"]),
            **{name: float(data[name]) for name in _FLOAT_FIELDS},
        )


_FLOAT_FIELDS = (
    "t",
    "E_kinetic_fluid",
    "E_kinetic_beam",
    "E_elastic",
    "E_total",
    "E_initial",
    "dissipation_cum",
    "balance_residual",
)


def state_energies(
    state: StateVector, operators: GalerkinOperators, basis: BasisSet, physics: PhysicsConfig
) -> tuple:
    """(fluid kinetic, beam kinetic, elastic) energies; operators at ``state``."""
    alpha = state.alpha
    kinetic_fluid = 0.5 * float(alpha @ operators.mass_fluid @ alpha)
    kinetic_beam = 0.5 * float(alpha @ operators.mass_beam @ alpha)
    weights = basis.beam.elastic_weights(physics.beta, physics.alpha)
    elastic = 0.5 * float(np.sum(weights * state.g_coeffs**2))
    return kinetic_fluid, kinetic_beam, elastic


def ledger_update(
    previous: Optional[EnergyLedger],
    state: StateVector,
    operators: GalerkinOperators,
    basis: BasisSet,
    physics: PhysicsConfig,
    dissipation: float = 0.0,
    step: Optional[int] = None,
) -> EnergyLedger:
    """Ledger row for ``state`` after a step that dissipated ``dissipation``.

    With ``previous=None`` the row starts a new ledger: E_initial is the
    energy of ``state`` and the dissipation restarts at zero.
    """
    kinetic_fluid, kinetic_beam, elastic = state_energies(state, operators, basis, physics)
    total = kinetic_fluid + kinetic_beam + elastic

    if previous is None:
        initial, cumulative = total, 0.0
        index = 0 if step is None else step
    else:
        slack = DISSIPATION_SLACK * max(1.0, abs(previous.E_total))
        if dissipation < -slack or not math.isfinite(dissipation):
            raise LedgerViolation(
                f"dissipation increment {dissipation:.3e} is negative at t={state.t:.6g}",
                increment=dissipation,
            )
        initial = previous.E_initial
        cumulative = previous.dissipation_cum + max(dissipation, 0.0)
        index = previous.step + 1 if step is None else step

    return EnergyLedger(
        step=index,
        t=state.t,
        E_kinetic_fluid=kinetic_fluid,
        E_kinetic_beam=kinetic_beam,
        E_elastic=elastic,
        E_total=total,
        E_initial=initial,
        dissipation_cum=cumulative,
        balance_residual=total + cumulative - initial,
    )
