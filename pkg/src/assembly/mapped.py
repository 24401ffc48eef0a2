"""Piola-mapped modes Phi = B^{-T} Psi and their time derivatives on a grid."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.basis.basis_set import ModeTable
from src.geometry.field import GeometryField


@dataclass(frozen=True)
class MappedModes:
    """Mapped modes shaped (N, n_x, n_z, 2) with gradients (N, n_x, n_z, 2, 2).

    ``phi_t``/``dphi_t`` hold dt(B^{-T}) Psi and its gradient; ``phi_tt``
    holds dtt(B^{-T}) Psi. Missing entries were not requested.
    """

    phi: np.ndarray
    dphi: np.ndarray
    phi_t: Optional[np.ndarray] = None
    dphi_t: Optional[np.ndarray] = None
    phi_tt: Optional[np.ndarray] = None


def apply_piola(P: np.ndarray, dP: np.ndarray, psi: np.ndarray, grad: np.ndarray):
    phi = np.einsum("xzim,nxzm->nxzi", P, psi)
    dphi = np.einsum("xzimd,nxzm->nxzid", dP, psi) + np.einsum("xzim,nxzmd->nxzid", P, grad)
    return phi, dphi


def map_modes(table: ModeTable, geometry: GeometryField, rates: bool = True, accel: bool = False) -> MappedModes:
    P, dP = geometry.piola()
    phi, dphi = apply_piola(P, dP, table.psi, table.grad)
    phi_t = dphi_t = phi_tt = None
    if rates:
        Q, dQ = geometry.piola_rate()
        phi_t, dphi_t = apply_piola(Q, dQ, table.psi, table.grad)
    if accel:
        phi_tt = np.einsum("xzim,nxzm->nxzi", geometry.piola_accel(), table.psi)
    return MappedModes(phi=phi, dphi=dphi, phi_t=phi_t, dphi_t=dphi_t, phi_tt=phi_tt)


# Field helpers -------------------------------------------------------------


def combine(coeffs: np.ndarray, stack: np.ndarray) -> np.ndarray:
    """sum_n coeffs[n] stack[n]."""
    return np.tensordot(np.asarray(coeffs, dtype=float), stack, axes=1)


def transport(u: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Coefficients w_d of u (B grad) = sum_d w_d d/d_d, i.e. w = B^T u."""
    return np.einsum("...a,...ad->...d", u, B)


def advect(w: np.ndarray, grad: np.ndarray) -> np.ndarray:
    """Apply the transport w . grad to (stacked) gradients [..., i, d]."""
    return np.einsum("xzd,...xzid->...xzi", w, grad)


def pair(test: np.ndarray, trial: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Matrix [k, j] = sum weights * test_k . trial_j over the grid."""
    return np.einsum("kxzi,jxzi,xz->kj", test, trial, weights)


def pair_grad(test: np.ndarray, trial: np.ndarray, A: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """Matrix [k, j] = sum weights (A grad trial_j^i) . grad test_k^i."""
    flux = np.einsum("xzde,jxzie->jxzid", A, trial)
    return np.einsum("kxzid,jxzid,xz->kj", test, flux, weights)
