"""Periodic, zero-mean, L2-orthonormal beam modes and the beam projection."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Sequence, Tuple, Union

import numpy as np

logger = logging.getLogger(__name__)

HeightData = Union[Callable[[np.ndarray], np.ndarray], Sequence[float], np.ndarray, float]

PAIRINGS = ("l2", "h2")


@dataclass(frozen=True)
class BeamMode:
    """psi_k = sqrt(2/L) sin(kappa x) for odd k, cos for even k (1-based)."""

    index: int
    wavenumber_index: int
    kappa: float
    parity: str
    amplitude: float

    def evaluate(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        """Value (order 0) or x-derivative of the given order."""
        x = np.asarray(x, dtype=float)
        phase = order * math.pi / 2.0
        if self.parity == "cos":
            phase += math.pi / 2.0
        return self.amplitude * self.kappa**order * np.sin(self.kappa * x + phase)


def build_beam_basis(length: float, count: int) -> List[BeamMode]:
    """First ``count`` beam modes ordered sin/cos per wavenumber."""
    if count < 1 or length <= 0:
        raise ValueError(f"beam basis needs K >= 1 and L > 0 (got K={count}, L={length})")
    amplitude = math.sqrt(2.0 / length)
    modes = []
    for k in range(1, count + 1):
        m = (k + 1) // 2
        modes.append(
            BeamMode(
                index=k,
                wavenumber_index=m,
                kappa=2.0 * math.pi * m / length,
                parity="sin" if k % 2 else "cos",
                amplitude=amplitude,
            )
        )
    return modes


class BeamBasis:
    """Evaluation helpers over an ordered list of beam modes."""

    def __init__(self, length: float, modes: Sequence[BeamMode]):
        self.length = float(length)
        self.modes = tuple(modes)
        self.kappa = np.array([mode.kappa for mode in self.modes])

    @classmethod
    def build(cls, length: float, count: int) -> "BeamBasis":
        return cls(length, build_beam_basis(length, count))

    def __len__(self) -> int:
        return len(self.modes)

    @property
    def max_wavenumber(self) -> int:
        return max(mode.wavenumber_index for mode in self.modes)

    def table(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        """Mode values (or derivatives) shaped (K, n_x)."""
        return np.stack([mode.evaluate(x, order) for mode in self.modes])

    def tables(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.table(x, 0), self.table(x, 1), self.table(x, 2)

    def evaluate(self, coeffs: np.ndarray, x: np.ndarray, order: int = 0, mean: float = 0.0) -> np.ndarray:
        values = np.asarray(coeffs, dtype=float) @ self.table(x, order)
        return values + mean if order == 0 else values

    def elastic_weights(self, beta: float, alpha: float) -> np.ndarray:
        """Diagonal of the beam stiffness: beta kappa^2 + alpha kappa^4."""
        return beta * self.kappa**2 + alpha * self.kappa**4

    def h2_weights(self) -> np.ndarray:
        return 1.0 + self.kappa**2 + self.kappa**4

    def h2_norm_sq(self, coeffs: np.ndarray, mean: float = 0.0) -> float:
        """||mean + sum c_k psi_k||^2 in H^2_per, computed spectrally."""
        coeffs = np.asarray(coeffs, dtype=float)
        return float(self.length * mean**2 + np.sum(coeffs**2 * self.h2_weights()))

    def fine_grid(self, oversample: int = 8) -> np.ndarray:
        n = max(256, 2 * oversample * self.max_wavenumber)
        return np.arange(n) * (self.length / n)


def sample_height(data: HeightData, x: np.ndarray) -> np.ndarray:
    if callable(data):
        return np.broadcast_to(np.asarray(data(x), dtype=float), x.shape).astype(float)
    return np.broadcast_to(np.asarray(data, dtype=float), x.shape).astype(float)


def project_initial_beam(
    h0: HeightData,
    basis: BeamBasis,
    pairing: str = "l2",
) -> Tuple[float, np.ndarray]:
    """Split h0 into its mean and the projection of the zero-mean rest.

    ``h0`` is a callable of x, a constant, or samples on the uniform grid
    x_i = i L / n. With ``pairing='h2'`` the coefficients are the H^2
    pairings (phi, psi_k)_{H^2}, which is not idempotent on span{psi_k}.
    """
    if pairing not in PAIRINGS:
        raise ValueError(f"unknown beam projection pairing '{pairing}'")

    if callable(h0) or np.ndim(h0) == 0:
        x = basis.fine_grid()
        values = sample_height(h0, x)
    else:
        values = np.asarray(h0, dtype=float).reshape(-1)
        x = np.arange(values.size) * (basis.length / values.size)
        if values.size < 2 * basis.max_wavenumber + 1:
            logger.warning(
                "Only %d height samples for wavenumber %d; projection aliases.",
                values.size,
                basis.max_wavenumber,
            )

    if float(np.min(values)) <= 0.0:
        logger.warning("Initial height has non-positive samples (min %.3e)", float(np.min(values)))

    weight = basis.length / values.size
    mean = float(np.mean(values))
    coeffs = weight * basis.table(x) @ (values - mean)
    if pairing == "h2":
        coeffs = coeffs * basis.h2_weights()
    return mean, coeffs
