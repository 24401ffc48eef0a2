"""Tensor quadrature and spectral differentiation on the reference strip."""

import math

import numpy as np
import pytest

from src.assembly.quadrature import build_quadrature
from src.core.errors import InvalidResolution

pytestmark = pytest.mark.unit


@pytest.fixture
def strip():
    return build_quadrature(1.0, 16, 8)


def test_weights_sum_to_area(strip):
    assert float(np.sum(strip.weights)) == pytest.approx(1.0)
    assert strip.shape == (16, 8)


def test_integrates_trigonometric_times_polynomial(strip):
    X, Z = np.meshgrid(strip.x, strip.z, indexing="ij")
    values = np.sin(2.0 * math.pi * X) ** 2 * Z**2
    assert float(strip.integrate(values)) == pytest.approx(0.5 / 3.0, rel=1e-13)


def test_integrate_x(strip):
    assert float(strip.integrate_x(np.cos(4.0 * math.pi * strip.x) ** 2)) == pytest.approx(0.5)


def test_spectral_x_derivative(strip):
    values = np.sin(2.0 * math.pi * strip.x)
    expected = 2.0 * math.pi * np.cos(2.0 * math.pi * strip.x)
    np.testing.assert_allclose(strip.dx(values), expected, atol=1e-12)


def test_x_derivative_along_axis(strip):
    X, Z = np.meshgrid(strip.x, strip.z, indexing="ij")
    values = np.cos(2.0 * math.pi * X) * Z
    expected = -2.0 * math.pi * np.sin(2.0 * math.pi * X) * Z
    np.testing.assert_allclose(strip.dx(values, axis=0), expected, atol=1e-12)


def test_z_derivative_of_polynomial(strip):
    values = strip.z**3 - strip.z
    np.testing.assert_allclose(strip.dz(values), 3.0 * strip.z**2 - 1.0, atol=1e-11)


def test_non_unit_length():
    grid = build_quadrature(2.0, 8, 4)
    assert float(np.sum(grid.wx)) == pytest.approx(2.0)
    np.testing.assert_allclose(grid.dx(np.sin(math.pi * grid.x)), math.pi * np.cos(math.pi * grid.x), atol=1e-12)


@pytest.mark.parametrize(
    "n_x, n_z, wavenumber, degree",
    [(7, 8, None, None), (2, 8, None, None), (8, 8, 3, None), (16, 6, None, 4), (16, 1, None, None)],
)
def test_under_resolved_grids_are_rejected(n_x, n_z, wavenumber, degree):
    with pytest.raises(InvalidResolution):
        build_quadrature(1.0, n_x, n_z, wavenumber, degree)


def test_non_positive_length_is_rejected():
    with pytest.raises(InvalidResolution):
        build_quadrature(0.0, 8, 4)
