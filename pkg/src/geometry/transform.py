"""Closed-form transformation matrices of the graph map (x, z) -> (x, h z).

All functions accept scalars or broadcastable numpy arrays; matrices are
returned with the 2x2 block in the trailing axes (``shape + (2, 2)``) and
vectors with a trailing axis of length 2.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from src.core.errors import NonPositiveHeight

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

DEFAULT_H_FLOOR = 1e-6


@dataclass(frozen=True)
class GeometrySample:
    """Height and its derivatives at reference points (x, z)."""

    h: ArrayLike
    dx_h: ArrayLike = 0.0
    dxx_h: ArrayLike = 0.0
    dt_h: ArrayLike = 0.0
    dtdx_h: ArrayLike = 0.0
    z: ArrayLike = 0.0

    def arrays(self) -> Sequence[np.ndarray]:
        return np.broadcast_arrays(
            *(np.asarray(v, dtype=float) for v in (self.h, self.dx_h, self.dxx_h, self.dt_h, self.dtdx_h, self.z))
        )


@dataclass(frozen=True)
class TransformMatrices:
    """A_h, B_h, B_h^{-T}, their time derivatives and the mesh velocity."""

    A: np.ndarray
    B: np.ndarray
    B_invT: np.ndarray
    dtB: np.ndarray
    dtB_invT: np.ndarray
    dtA: np.ndarray
    chi_dt: np.ndarray


@dataclass(frozen=True)
class CorrectionField:
    G: np.ndarray


@dataclass(frozen=True)
class PressureTestField:
    phi: np.ndarray


def check_height(h: ArrayLike, h_floor: float = DEFAULT_H_FLOOR) -> None:
    h_min = float(np.min(h))
    if not np.isfinite(h_min) or h_min <= h_floor:
        raise NonPositiveHeight(
            f"height {h_min:.3e} at or below floor {h_floor:.1e}", min_height=h_min, h_floor=h_floor
        )


def _mat(a11: np.ndarray, a12: np.ndarray, a21: np.ndarray, a22: np.ndarray) -> np.ndarray:
    shape = np.broadcast_shapes(np.shape(a11), np.shape(a12), np.shape(a21), np.shape(a22))
    out = np.empty(shape + (2, 2))
    out[..., 0, 0] = a11
    out[..., 0, 1] = a12
    out[..., 1, 0] = a21
    out[..., 1, 1] = a22
    return out


def _vec(a1: np.ndarray, a2: np.ndarray) -> np.ndarray:
    shape = np.broadcast_shapes(np.shape(a1), np.shape(a2))
    out = np.empty(shape + (2,))
    out[..., 0] = a1
    out[..., 1] = a2
    return out


def transform_matrices(s: GeometrySample, h_floor: float = DEFAULT_H_FLOOR) -> TransformMatrices:
    """Evaluate the closed-form entries of A_h, B_h, B_h^{-T} and their rates."""
    h, hx, _, ht, htx, z = s.arrays()
    check_height(h, h_floor)

    zero = np.zeros_like(h)
    one = np.ones_like(h)
    r = hx / h
    rt = htx / h - hx * ht / h**2

    B = _mat(h, -z * hx, zero, one)
    B_invT = _mat(1.0 / h, zero, z * r, one)
    A = _mat(h, -z * hx, -z * hx, (1.0 + (z * hx) ** 2) / h)
    dtB = _mat(ht, -z * htx, zero, zero)
    dtB_invT = _mat(-ht / h**2, zero, z * rt, zero)
    dtA = _mat(
        ht,
        -z * htx,
        -z * htx,
        2.0 * z**2 * hx * htx / h - (1.0 + (z * hx) ** 2) * ht / h**2,
    )
    chi_dt = _vec(zero, z * ht)
    return TransformMatrices(A=A, B=B, B_invT=B_invT, dtB=dtB, dtB_invT=dtB_invT, dtA=dtA, chi_dt=chi_dt)


def correction_field(u_hat: np.ndarray, s: GeometrySample, h_floor: float = DEFAULT_H_FLOOR) -> CorrectionField:
    """G = B^{-T} dtB^T u_hat, which only sees the first velocity component."""
    h, hx, _, ht, htx, z = s.arrays()
    check_height(h, h_floor)
    u1 = np.asarray(u_hat, dtype=float)[..., 0]
    G = _vec(ht * u1 / h, z / h * ht * hx * u1 - z * htx * u1)
    return CorrectionField(G=G)


def pressure_test_field(
    u_hat: np.ndarray,
    dt_u_hat: np.ndarray,
    s: GeometrySample,
    h_floor: float = DEFAULT_H_FLOOR,
) -> PressureTestField:
    """Four-term closed form of phi = B^{-T} dtB^T (dt u_hat + G)."""
    h, hx, _, ht, htx, z = s.arrays()
    check_height(h, h_floor)
    u1 = np.asarray(u_hat, dtype=float)[..., 0]
    du1 = np.asarray(dt_u_hat, dtype=float)[..., 0]

    phi1 = ht * du1 / h + ht**2 * u1 / h**2
    phi2 = (
        z / h * ht * hx * du1
        + z / h**2 * ht**2 * hx * u1
        - z * htx * du1
        - z / h * ht * htx * u1
    )
    return PressureTestField(phi=_vec(phi1, phi2))


def matvec(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray:
    """Batched 2x2 matrix times 2-vector over the leading axes."""
    return np.einsum("...ij,...j->...i", matrix, vector)
