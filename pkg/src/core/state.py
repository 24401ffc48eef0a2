"""Immutable simulation state and per-step reports."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np


def _frozen(values: Any) -> np.ndarray:
    array = np.array(values, dtype=float, copy=True).reshape(-1)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class StateVector:
    """Snapshot of the discrete state at time ``t``.

    ``alpha`` holds the N modal velocity coefficients, ``g_coeffs`` the
    zero-mean beam coefficients (one per lifted mode) and ``g_mean`` the
    conserved mean height.
    """

    t: float
    alpha: np.ndarray
    g_coeffs: np.ndarray
    g_mean: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "alpha", _frozen(self.alpha))
        object.__setattr__(self, "g_coeffs", _frozen(self.g_coeffs))
        object.__setattr__(self, "g_mean", float(self.g_mean))

    @property
    def n_pairs(self) -> int:
        return int(self.alpha.size)

    def replace(self, **changes: Any) -> "StateVector":
        data = {"t": self.t, "alpha": self.alpha, "g_coeffs": self.g_coeffs, "g_mean": self.g_mean}
        data.update(changes)
        return StateVector(**data)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "alpha": [float(v) for v in self.alpha],
            "g_coeffs": [float(v) for v in self.g_coeffs],
            "g_mean": self.g_mean,
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "StateVector":
        return cls(
            t=data["t"],
            alpha=data["alpha"],
            g_coeffs=data["g_coeffs"],
            g_mean=data.get("g_mean", 1.0),
        )


@dataclass(frozen=True)
class StepReport:
    """Outcome of one accepted time step."""

    picard_iterations: int
    picard_residual: float
    dt: float
    min_height: float
    energy_residual: float = 0.0
    dissipation: float = 0.0
    halvings: int = 0
