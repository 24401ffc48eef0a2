"""Beam-driven geometry sampled on a tensor grid of reference nodes.

A ``GeometryField`` stores h and its x/t derivatives at the x nodes and
expands them lazily into the nodal matrix fields used by assembly. The
Piola fields ``P = B^{-T}`` (and its time derivatives) are returned with
their spatial gradients so mapped modes ``P @ Psi`` can be differentiated
exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .transform import DEFAULT_H_FLOOR, GeometrySample, TransformMatrices, check_height, transform_matrices


@dataclass(frozen=True)
class GeometryField:
    """h, dx h, dxx h, dt h, dt dx h, dt dxx h, dtt h, dtt dx h at x nodes."""

    x: np.ndarray
    z: np.ndarray
    h: np.ndarray
    dx_h: np.ndarray
    dxx_h: np.ndarray
    dt_h: np.ndarray
    dtdx_h: np.ndarray
    dtdxx_h: np.ndarray
    dtt_h: np.ndarray
    dttdx_h: np.ndarray

    @classmethod
    def from_modes(
        cls,
        x: np.ndarray,
        z: np.ndarray,
        tables: Tuple[np.ndarray, np.ndarray, np.ndarray],
        mean: float,
        coeffs: np.ndarray,
        rate: Optional[np.ndarray] = None,
        accel: Optional[np.ndarray] = None,
    ) -> "GeometryField":
        """Build from beam coefficients.

        ``tables`` holds (psi, dx psi, dxx psi) of the beam modes at the x
        nodes, each shaped (K, n_x). ``rate`` and ``accel`` are the
        coefficients of dt g and dtt g; missing ones are taken as zero.
        """
        values, dx, dxx = tables
        coeffs = np.asarray(coeffs, dtype=float)
        rate = np.zeros_like(coeffs) if rate is None else np.asarray(rate, dtype=float)
        accel = np.zeros_like(coeffs) if accel is None else np.asarray(accel, dtype=float)
        return cls(
            x=np.asarray(x, dtype=float),
            z=np.asarray(z, dtype=float),
            h=mean + coeffs @ values,
            dx_h=coeffs @ dx,
            dxx_h=coeffs @ dxx,
            dt_h=rate @ values,
            dtdx_h=rate @ dx,
            dtdxx_h=rate @ dxx,
            dtt_h=accel @ values,
            dttdx_h=accel @ dx,
        )

    # Nodal expansion ------------------------------------------------------

    def _col(self, values: np.ndarray) -> np.ndarray:
        return values[:, None]

    @property
    def zz(self) -> np.ndarray:
        return self.z[None, :]

    def check(self, h_floor: float = DEFAULT_H_FLOOR) -> None:
        check_height(self.h, h_floor)

    def min_height(self) -> float:
        return float(np.min(self.h))

    def sample(self) -> GeometrySample:
        return GeometrySample(
            h=self._col(self.h),
            dx_h=self._col(self.dx_h),
            dxx_h=self._col(self.dxx_h),
            dt_h=self._col(self.dt_h),
            dtdx_h=self._col(self.dtdx_h),
            z=self.zz,
        )

    def matrices(self, h_floor: float = DEFAULT_H_FLOOR) -> TransformMatrices:
        return transform_matrices(self.sample(), h_floor)

    def chi_ddot(self) -> np.ndarray:
        out = np.zeros((self.x.size, self.z.size, 2))
        out[..., 1] = self.zz * self._col(self.dtt_h)
        return out

    def _lower(self, p11: np.ndarray, p21: np.ndarray, p22: float) -> np.ndarray:
        shape = (self.x.size, self.z.size)
        out = np.zeros(shape + (2, 2))
        out[..., 0, 0] = np.broadcast_to(p11, shape)
        out[..., 1, 0] = np.broadcast_to(p21, shape)
        out[..., 1, 1] = p22
        return out

    def _lower_grad(self, p11_x: np.ndarray, p21_x: np.ndarray, p21_z: np.ndarray) -> np.ndarray:
        shape = (self.x.size, self.z.size)
        out = np.zeros(shape + (2, 2, 2))
        out[..., 0, 0, 0] = np.broadcast_to(p11_x, shape)
        out[..., 1, 0, 0] = np.broadcast_to(p21_x, shape)
        out[..., 1, 0, 1] = np.broadcast_to(p21_z, shape)
        return out

    def piola(self) -> Tuple[np.ndarray, np.ndarray]:
        """B^{-T} at the nodes and its gradient, indexed [..., i, m, d]."""
        h, hx, hxx = (self._col(v) for v in (self.h, self.dx_h, self.dxx_h))
        z = self.zz
        r = hx / h
        r_x = hxx / h - hx**2 / h**2
        P = self._lower(1.0 / h, z * r, 1.0)
        dP = self._lower_grad(-hx / h**2, z * r_x, r)
        return P, dP

    def piola_rate(self) -> Tuple[np.ndarray, np.ndarray]:
        """dt B^{-T} and its gradient."""
        h, hx, hxx = (self._col(v) for v in (self.h, self.dx_h, self.dxx_h))
        ht, htx, htxx = (self._col(v) for v in (self.dt_h, self.dtdx_h, self.dtdxx_h))
        z = self.zz
        rt = htx / h - hx * ht / h**2
        rt_x = (
            htxx / h
            - htx * hx / h**2
            - (hxx * ht + hx * htx) / h**2
            + 2.0 * hx**2 * ht / h**3
        )
        Q = self._lower(-ht / h**2, z * rt, 0.0)
        dQ = self._lower_grad(-htx / h**2 + 2.0 * ht * hx / h**3, z * rt_x, rt)
        return Q, dQ

    def piola_accel(self) -> np.ndarray:
        """dtt B^{-T}; its gradient never enters the tensors."""
        h, hx = self._col(self.h), self._col(self.dx_h)
        ht, htx = self._col(self.dt_h), self._col(self.dtdx_h)
        htt, httx = self._col(self.dtt_h), self._col(self.dttdx_h)
        z = self.zz
        rtt = (
            httx / h
            - htx * ht / h**2
            - (htx * ht + hx * htt) / h**2
            + 2.0 * hx * ht**2 / h**3
        )
        return self._lower(-htt / h**2 + 2.0 * ht**2 / h**3, z * rtt, 0.0)
