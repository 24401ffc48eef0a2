"""Direct-quadrature reference assembly for small bases.

Everything is evaluated mode by mode with explicit loops: the transform
matrices come from ``transform_matrices`` at each node, gradients of the
Piola factors from spectral differentiation of their nodal values, and
every entry is a separate weighted sum. Only usable for a handful of
pairs; the production assembly is checked against it entry by entry.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict

import numpy as np

from src.assembly.quadrature import QuadratureGrid
from src.basis.basis_set import BasisSet
from src.core.state import StateVector
from src.geometry.transform import DEFAULT_H_FLOOR, GeometrySample, matvec, transform_matrices
from src.pipeline.config import PhysicsConfig


@dataclass(frozen=True)
class OracleOperators:
    mass: np.ndarray
    viscous: np.ndarray
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    convection: np.ndarray
    D: np.ndarray
    E_sym: np.ndarray

    def as_dict(self) -> Dict[str, np.ndarray]:
        return {
            "M": self.mass,
            "S": self.viscous,
            "A": self.A,
            "B": self.B,
            "C": self.C,
            "C3": self.convection,
            "D": self.D,
            "E_sym": self.E_sym,
        }


def _heights(basis: BasisSet, x: np.ndarray, mean: float, coeffs, rate, accel):
    h = np.full(x.shape, mean, dtype=float)
    hx = np.zeros_like(h)
    ht = np.zeros_like(h)
    htx = np.zeros_like(h)
    htt = np.zeros_like(h)
    httx = np.zeros_like(h)
    for k, mode in enumerate(basis.beam.modes):
        value, slope = mode.evaluate(x, 0), mode.evaluate(x, 1)
        h += coeffs[k] * value
        hx += coeffs[k] * slope
        ht += rate[k] * value
        htx += rate[k] * slope
        htt += accel[k] * value
        httx += accel[k] * slope
    return h, hx, ht, htx, htt, httx


def _spectral_gradient(field: np.ndarray, grid: QuadratureGrid) -> np.ndarray:
    """Gradient of a nodal (n_x, n_z, 2, 2) field, appended as a last axis."""
    out = np.zeros(field.shape + (2,))
    for i in range(2):
        for m in range(2):
            out[..., i, m, 0] = grid.dx(field[..., i, m], axis=0)
            out[..., i, m, 1] = grid.dz(field[..., i, m], axis=1)
    return out


def _mapped(P: np.ndarray, dP: np.ndarray, psi: np.ndarray, grad: np.ndarray):
    value = matvec(P, psi)
    gradient = np.empty(psi.shape + (2,))
    for d in range(2):
        gradient[..., d] = matvec(dP[..., d], psi) + matvec(P, grad[..., d])
    return value, gradient


def _inner(f: np.ndarray, g: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sum(weights * np.sum(f * g, axis=-1)))


def _inner_grad(f: np.ndarray, g: np.ndarray, A: np.ndarray, weights: np.ndarray) -> float:
    # sum_i sum_{d,e} A_de dg^i/de df^i/dd
    total = np.zeros(weights.shape)
    for i in range(2):
        for d in range(2):
            for e in range(2):
                total += A[..., d, e] * g[..., i, e] * f[..., i, d]
    return float(np.sum(weights * total))


def _directional(w: np.ndarray, gradient: np.ndarray) -> np.ndarray:
    """(w . grad) applied to a vector field given by its gradient."""
    return w[..., 0, None] * gradient[..., 0] + w[..., 1, None] * gradient[..., 1]


def direct_operators(
    state: StateVector,
    basis: BasisSet,
    grid: QuadratureGrid,
    physics: PhysicsConfig,
    alpha_dot: np.ndarray,
    h_floor: float = DEFAULT_H_FLOOR,
) -> OracleOperators:
    """Reference M, S, AA, BB, CC, C3, DD and symmetrised EE at ``state``."""
    n = basis.n_pairs
    rho_f, rho_s, mu = physics.rho_f, physics.rho_s, physics.mu
    x, z = grid.x, grid.z

    rate = basis.beam_part(state.alpha)
    accel = basis.beam_part(alpha_dot)
    h, hx, ht, htx, htt, httx = _heights(basis, x, state.g_mean, state.g_coeffs, rate, accel)

    col = lambda v: v[:, None]  # noqa: E731
    Z = np.broadcast_to(z[None, :], grid.shape)
    sample = GeometrySample(h=col(h), dx_h=col(hx), dt_h=col(ht), dtdx_h=col(htx), z=Z)
    mats = transform_matrices(sample, h_floor)
    B, A, dtA, dtB = mats.B, mats.A, mats.dtA, mats.dtB
    Bt = np.swapaxes(B, -1, -2)
    dtBt = np.swapaxes(dtB, -1, -2)

    P = mats.B_invT
    Q = mats.dtB_invT
    inv_tt = 2.0 * ht**2 / h**3 - htt / h**2
    ratio_tt = httx / h - 2.0 * htx * ht / h**2 - hx * htt / h**2 + 2.0 * hx * ht**2 / h**3
    R = np.zeros(grid.shape + (2, 2))
    R[..., 0, 0] = col(inv_tt)
    R[..., 1, 0] = Z * col(ratio_tt)
    dP = _spectral_gradient(P, grid)
    dQ = _spectral_gradient(Q, grid)

    chi_t = np.zeros(grid.shape + (2,))
    chi_t[..., 1] = Z * col(ht)
    chi_tt = np.zeros(grid.shape + (2,))
    chi_tt[..., 1] = Z * col(htt)

    psi, grad = basis.evaluate(x, z)
    phi, dphi, phit, dphit, phitt = [], [], [], [], []
    for k in range(n):
        value, gradient = _mapped(P, dP, psi[k], grad[k])
        rate_value, rate_gradient = _mapped(Q, dQ, psi[k], grad[k])
        phi.append(value)
        dphi.append(gradient)
        phit.append(rate_value)
        dphit.append(rate_gradient)
        phitt.append(matvec(R, psi[k]))

    beam_rows = np.zeros((3, n, x.size))
    for position, beam_index in zip(basis.lifted_positions, range(basis.n_beam)):
        mode = basis.beam.modes[beam_index]
        for order in range(3):
            beam_rows[order, position] = mode.evaluate(x, order)

    W = grid.weights
    Wh = W * col(h)
    Wht = W * col(ht)
    wx = grid.wx

    w_chi = matvec(Bt, chi_t)
    w_chi_dot = matvec(dtBt, chi_t)
    w_chi_acc = matvec(Bt, chi_tt)

    def beam(order: int, weights: np.ndarray, k: int, j: int) -> float:
        return float(np.sum(weights * beam_rows[order, k] * beam_rows[order, j]))

    mass = np.zeros((n, n))
    viscous = np.zeros((n, n))
    BB = np.zeros((n, n))
    CC = np.zeros((n, n))
    for k in range(n):
        for j in range(n):
            mass[k, j] = rho_f * _inner(phi[j], phi[k], Wh) + rho_s * beam(0, wx, k, j)
            viscous[k, j] = mu * _inner_grad(dphi[k], dphi[j], A, W)
            BB[k, j] = (
                rho_f * _inner(phi[j], phi[k], Wht)
                + 2.0 * rho_f * _inner(phit[j], phi[k], Wh)
                + rho_f * _inner(phi[j], phit[k], Wh)
                - rho_f * _inner(_directional(w_chi, dphi[j]), phi[k], W)
                + viscous[k, j]
                + 0.5 * rho_f * beam(0, wx * ht, k, j)
            )
            CC[k, j] = (
                rho_f * _inner(phit[j], phi[k], Wht)
                + rho_f * _inner(phitt[j], phi[k], Wh)
                + rho_f * _inner(phit[j], phit[k], Wh)
                - rho_f * _inner(_directional(w_chi_acc, dphi[j]), phi[k], W)
                - rho_f * _inner(_directional(w_chi_dot, dphi[j]), phi[k], W)
                - rho_f * _inner(_directional(w_chi, dphit[j]), phi[k], W)
                - rho_f * _inner(_directional(w_chi, dphi[j]), phit[k], W)
                + mu * _inner_grad(dphi[k], dphi[j], dtA, W)
                + mu * _inner_grad(dphi[k], dphit[j], A, W)
                + mu * _inner_grad(dphit[k], dphi[j], A, W)
                + physics.beta * beam(1, wx, k, j)
                + physics.alpha * beam(2, wx, k, j)
                + 0.5 * rho_f * beam(0, wx * htt, k, j)
            )

    # G1[a, b, c] = <Phi_b (B grad) Phi_c, Phi_a> and its total time derivative.
    G1 = np.zeros((n, n, n))
    dG1 = np.zeros((n, n, n))
    for b in range(n):
        w = matvec(Bt, phi[b])
        w_rate = matvec(Bt, phit[b]) + matvec(dtBt, phi[b])
        for c in range(n):
            transported = _directional(w, dphi[c])
            transported_rate = _directional(w_rate, dphi[c]) + _directional(w, dphit[c])
            for a in range(n):
                G1[a, b, c] = _inner(transported, phi[a], W)
                dG1[a, b, c] = _inner(transported_rate, phi[a], W) + _inner(transported, phit[a], W)

    convection = np.zeros((n, n, n))
    D = np.zeros((n, n, n))
    E = np.zeros((n, n, n))
    for k in range(n):
        for l in range(n):
            for j in range(n):
                convection[k, l, j] = 0.5 * rho_f * (G1[k, l, j] - G1[j, l, k])
                D[k, l, j] = 0.5 * rho_f * (G1[k, l, j] + G1[k, j, l] - G1[j, l, k] - G1[l, j, k])
                E[k, l, j] = 0.5 * rho_f * (dG1[k, l, j] - dG1[j, l, k])
    E_sym = 0.5 * (E + np.transpose(E, (0, 2, 1)))

    return OracleOperators(
        mass=mass,
        viscous=viscous,
        A=mass.copy(),
        B=BB,
        C=CC,
        convection=convection,
        D=D,
        E_sym=E_sym,
    )


def relative_error(candidate: np.ndarray, reference: np.ndarray) -> float:
    scale = max(float(np.max(np.abs(reference), initial=0.0)), np.finfo(float).tiny)
    return float(np.max(np.abs(candidate - reference), initial=0.0)) / scale
