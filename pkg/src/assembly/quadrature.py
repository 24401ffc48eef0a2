"""Tensor-product quadrature on the reference strip [0, L] x [0, 1].

x: equispaced periodic nodes with equal weights (exact for trigonometric
polynomials below the Nyquist limit). z: Gauss-Legendre mapped to [0, 1].
Spectral differentiation uses the FFT in x and the Legendre interpolant
through the Gauss nodes in z.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from numpy.polynomial import legendre

from src.core.errors import InvalidResolution

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadratureGrid:
    length: float
    x: np.ndarray
    wx: np.ndarray
    z: np.ndarray
    wz: np.ndarray
    weights: np.ndarray = field(repr=False)
    dz_matrix: np.ndarray = field(repr=False)

    @property
    def n_x(self) -> int:
        return int(self.x.size)

    @property
    def n_z(self) -> int:
        return int(self.z.size)

    @property
    def shape(self) -> tuple:
        return (self.n_x, self.n_z)

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Integrate samples shaped (..., n_x, n_z) over the strip."""
        return np.einsum("...ij,ij->...", values, self.weights)

    def integrate_x(self, values: np.ndarray) -> np.ndarray:
        """Integrate samples shaped (..., n_x) over [0, L]."""
        return np.einsum("...i,i->...", values, self.wx)

    def dx(self, values: np.ndarray, axis: int = 0) -> np.ndarray:
        """Spectral x-derivative of periodic samples along ``axis``."""
        values = np.moveaxis(np.asarray(values, dtype=float), axis, 0)
        spectrum = np.fft.rfft(values, axis=0)
        k = 2.0 * np.pi * np.fft.rfftfreq(self.n_x, d=self.length / self.n_x)
        factor = 1j * k
        if self.n_x % 2 == 0:
            factor[-1] = 0.0
        spectrum *= factor.reshape((-1,) + (1,) * (values.ndim - 1))
        out = np.fft.irfft(spectrum, n=self.n_x, axis=0)
        return np.moveaxis(out, 0, axis)

    def dz(self, values: np.ndarray, axis: int = -1) -> np.ndarray:
        """z-derivative of the Legendre interpolant through the nodes."""
        values = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
        out = values @ self.dz_matrix.T
        return np.moveaxis(out, -1, axis)


def _dz_matrix(z: np.ndarray) -> np.ndarray:
    n = z.size
    t = 2.0 * z - 1.0
    vander = legendre.legvander(t, n - 1)
    dvander = np.empty_like(vander)
    for k in range(n):
        coeffs = np.zeros(n)
        coeffs[k] = 1.0
        dvander[:, k] = 2.0 * legendre.legval(t, legendre.legder(coeffs))
    return np.linalg.solve(vander.T, dvander.T).T


def gauss_legendre_unit(n: int) -> tuple:
    """Gauss-Legendre nodes and weights on [0, 1]."""
    t, w = legendre.leggauss(n)
    return 0.5 * (t + 1.0), 0.5 * w


def build_quadrature(
    length: float,
    n_x: int,
    n_z: int,
    max_wavenumber: Optional[int] = None,
    max_z_degree: Optional[int] = None,
) -> QuadratureGrid:
    """Build the tensor grid, validating it against the basis resolution.

    ``max_wavenumber`` is the largest Fourier index 2*pi*m/L carried by the
    basis and ``max_z_degree`` the largest polynomial degree in z.
    """
    if length <= 0:
        raise InvalidResolution(f"domain length must be positive, got {length}")
    if n_x < 4 or n_x % 2:
        raise InvalidResolution(f"n_x must be even and >= 4, got {n_x}")
    if n_z < 2:
        raise InvalidResolution(f"n_z must be >= 2, got {n_z}")
    if max_wavenumber is not None and n_x < 4 * max_wavenumber:
        raise InvalidResolution(
            f"n_x={n_x} under-resolves wavenumber {max_wavenumber} (need >= {4 * max_wavenumber})"
        )
    if max_z_degree is not None and n_z < 2 * max_z_degree + 2:
        raise InvalidResolution(
            f"n_z={n_z} under-resolves z-degree {max_z_degree} (need >= {2 * max_z_degree + 2})"
        )

    x = np.arange(n_x) * (length / n_x)
    wx = np.full(n_x, length / n_x)
    z, wz = gauss_legendre_unit(n_z)
    logger.debug("Quadrature grid %d x %d on L=%g", n_x, n_z, length)
    return QuadratureGrid(
        length=float(length),
        x=x,
        wx=wx,
        z=z,
        wz=wz,
        weights=np.outer(wx, wz),
        dz_matrix=_dz_matrix(z),
    )
