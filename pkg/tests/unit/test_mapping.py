"""Pullback/pushforward between the reference strip and the physical domain."""

import math

import numpy as np
import pytest

from src.assembly.quadrature import gauss_legendre_unit
from src.core.errors import NonPositiveHeight
from src.geometry.mapping import l2_norm_ratio, pullback, pushforward

pytestmark = pytest.mark.unit


def height(x):
    return 1.0 + 0.25 * np.cos(2.0 * math.pi * x)


def field(x, y):
    return y**3 - 2.0 * y + np.sin(2.0 * math.pi * x)


def test_pullback_samples_along_columns():
    x = np.linspace(0.0, 1.0, 8, endpoint=False)
    z = np.array([0.0, 0.5, 1.0])
    out = pullback(lambda X, Y: Y, height, x, z)
    np.testing.assert_allclose(out, height(x)[:, None] * z[None, :])


def test_round_trip_is_exact_for_polynomials_in_y():
    x = np.linspace(0.0, 1.0, 16, endpoint=False)
    z_nodes, _ = gauss_legendre_unit(8)
    f_hat = pullback(field, height, x, z_nodes)
    y = np.outer(height(x), np.linspace(0.0, 1.0, 11))
    physical = pushforward(f_hat, height, x, y, z_nodes)
    np.testing.assert_allclose(physical, field(x[:, None], y), atol=1e-11)


def test_pushforward_accepts_shared_y_vector():
    x = np.linspace(0.0, 1.0, 4, endpoint=False)
    z_nodes, _ = gauss_legendre_unit(6)
    f_hat = pullback(lambda X, Y: Y**2, 0.5, x, z_nodes)
    out = pushforward(f_hat, 0.5, x, np.array([0.0, 0.25, 0.5]), z_nodes)
    np.testing.assert_allclose(out, np.broadcast_to([0.0, 0.0625, 0.25], (4, 3)), atol=1e-13)


def test_norm_ratio_lies_between_height_extremes(rng):
    x = np.linspace(0.0, 1.0, 12, endpoint=False)
    wx = np.full(12, 1.0 / 12)
    _, wz = gauss_legendre_unit(5)
    heights = rng.uniform(0.2, 3.0, 12)
    ratio = l2_norm_ratio(rng.normal(size=(12, 5, 2)), heights, wx, wz)
    assert heights.min() <= ratio <= heights.max()


def test_norm_ratio_of_zero_field_is_zero():
    assert l2_norm_ratio(np.zeros((4, 3)), np.ones(4), np.ones(4), np.ones(3)) == 0.0


def test_flat_unit_height_preserves_norm(rng):
    _, wz = gauss_legendre_unit(4)
    ratio = l2_norm_ratio(rng.normal(size=(6, 4)), np.ones(6), np.full(6, 1 / 6), wz)
    assert ratio == pytest.approx(1.0)


def test_negative_height_raises():
    with pytest.raises(NonPositiveHeight):
        pullback(field, -1.0, np.array([0.0, 0.5]), np.array([0.5]))
