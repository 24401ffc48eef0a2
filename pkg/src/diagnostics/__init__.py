"""Energy ledger, constraint residuals and the monitored norm budget."""

from .budget import NormBudget, norm_budget
from .compatibility import CompatibilityReport, compatibility_residuals
from .energy import EnergyLedger, compute_C0, ledger_update, state_energies

__all__ = [
    "EnergyLedger",
    "compute_C0",
    "ledger_update",
    "state_energies",
    "CompatibilityReport",
    "compatibility_residuals",
    "NormBudget",
    "norm_budget",
]
