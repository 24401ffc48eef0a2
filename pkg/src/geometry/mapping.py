"""Pullback to the reference strip and pushforward to the physical domain.

Sampling rule: fields on the reference strip are held at the vertical
quadrature nodes of each x column. The pushforward evaluates the unique
polynomial through those nodes (barycentric form) at z = y / h(x), so a
round trip is exact for fields polynomial in y of degree < n_z and
spectrally accurate for smooth ones.
"""

from __future__ import annotations

import logging
from typing import Callable, Union

import numpy as np
from scipy.interpolate import BarycentricInterpolator

from .transform import DEFAULT_H_FLOOR, check_height

logger = logging.getLogger(__name__)

Field = Callable[[np.ndarray, np.ndarray], np.ndarray]


def _heights(h: Union[Callable[[np.ndarray], np.ndarray], np.ndarray, float], x: np.ndarray) -> np.ndarray:
    if callable(h):
        values = np.asarray(h(x), dtype=float)
    else:
        values = np.asarray(h, dtype=float)
    return np.broadcast_to(values, x.shape).astype(float)


def pullback(
    f: Field,
    h: Union[Callable[[np.ndarray], np.ndarray], np.ndarray, float],
    x: np.ndarray,
    z: np.ndarray,
    h_floor: float = DEFAULT_H_FLOOR,
) -> np.ndarray:
    """Return f_hat(x_i, z_j) = f(x_i, h(x_i) z_j) with shape (n_x, n_z)."""
    x = np.asarray(x, dtype=float)
    z = np.asarray(z, dtype=float)
    heights = _heights(h, x)
    check_height(heights, h_floor)
    X = np.broadcast_to(x[:, None], (x.size, z.size))
    Y = heights[:, None] * z[None, :]
    return np.asarray(f(X, Y), dtype=float)


def pushforward(
    f_hat: np.ndarray,
    h: Union[Callable[[np.ndarray], np.ndarray], np.ndarray, float],
    x: np.ndarray,
    y: np.ndarray,
    z_nodes: np.ndarray,
    h_floor: float = DEFAULT_H_FLOOR,
) -> np.ndarray:
    """Evaluate the physical field at (x_i, y_ij) from reference samples.

    ``f_hat`` has shape (n_x, n_z) on the vertical nodes ``z_nodes``; ``y``
    is (n_x, n_y) or a shared (n_y,) vector of heights in [0, h(x_i)].
    """
    x = np.asarray(x, dtype=float)
    heights = _heights(h, x)
    check_height(heights, h_floor)
    f_hat = np.asarray(f_hat, dtype=float)
    y = np.asarray(y, dtype=float)
    if y.ndim == 1:
        y = np.broadcast_to(y[None, :], (x.size, y.size))

    out = np.empty(y.shape)
    for i in range(x.size):
        column = BarycentricInterpolator(z_nodes, f_hat[i])
        out[i] = column(y[i] / heights[i])
    return out


def l2_norm_ratio(f_hat: np.ndarray, h: np.ndarray, wx: np.ndarray, wz: np.ndarray) -> float:
    """||f||^2 on the physical domain over ||f_hat||^2 on the strip.

    The change of variables dy = h dz pins the ratio inside [min h, max h].
    """
    weights = np.outer(wx, wz)
    density = np.sum(f_hat**2, axis=-1) if f_hat.ndim == 3 else f_hat**2
    reference = float(np.sum(weights * density))
    if reference == 0.0:
        return 0.0
    physical = float(np.sum(weights * np.asarray(h)[:, None] * density))
    return physical / reference
