"""Projection of smooth initial data converges as the basis grows."""

import math

import numpy as np
import pytest

from src.assembly.quadrature import build_quadrature
from src.basis.basis_set import build_basis_set
from src.basis.beam import BeamBasis, project_initial_beam
from src.basis.projection import project_initial_fluid, sample_velocity
from src.pipeline.config import DiscretizationConfig

pytestmark = pytest.mark.unit

SIZES = (8, 16, 32)
FINE_X = np.arange(512) / 512.0


def bumpy_height(x):
    return np.exp(0.4 * np.cos(2.0 * math.pi * np.asarray(x, dtype=float)))


def swirl(X, Z):
    """Divergence-free, no-slip flow from the streamfunction sin(t) e^{cos(t)/2} z^2 (1-z)^2."""
    theta = 2.0 * math.pi * X
    envelope = np.exp(0.5 * np.cos(theta))
    F = np.sin(theta) * envelope
    dF = 2.0 * math.pi * (np.cos(theta) - 0.5 * np.sin(theta) ** 2) * envelope
    p = Z**2 * (1.0 - Z) ** 2
    dp = 2.0 * Z * (1.0 - Z) * (1.0 - 2.0 * Z)
    return np.stack([F * dp, -dF * p], axis=-1)


def _grid_for(basis):
    n_x, n_z = DiscretizationConfig(n_pairs=basis.n_pairs).grid_sizes(
        basis.max_wavenumber, basis.max_z_degree, basis.length
    )
    return build_quadrature(basis.length, n_x, n_z, basis.max_wavenumber, basis.max_z_degree)


def test_beam_coefficients_decay_with_wavenumber():
    beam = BeamBasis.build(1.0, 16)
    mean, coeffs = project_initial_beam(bumpy_height, beam)

    assert mean == pytest.approx(np.mean(bumpy_height(FINE_X)))
    sin_part, cos_part = coeffs[0::2], coeffs[1::2]
    np.testing.assert_allclose(sin_part, 0.0, atol=1e-13)
    magnitudes = np.abs(cos_part)
    assert np.all(magnitudes[1:] < magnitudes[:-1])
    assert magnitudes[-1] < 1e-9


def test_beam_projection_error_drops_with_n():
    target = bumpy_height(FINE_X)
    errors = []
    for n_pairs in SIZES:
        beam = BeamBasis.build(1.0, (n_pairs + 1) // 2)
        mean, coeffs = project_initial_beam(bumpy_height, beam)
        errors.append(float(np.max(np.abs(beam.evaluate(coeffs, FINE_X, mean=mean) - target))))

    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-9


def test_fluid_projection_error_drops_with_n():
    reference = build_quadrature(1.0, 128, 40)
    target = sample_velocity(swirl, reference)
    errors = []
    for n_pairs in SIZES:
        basis = build_basis_set(1.0, n_pairs)
        alpha = project_initial_fluid(swirl, 1.0, 0.0, basis, _grid_for(basis))
        np.testing.assert_allclose(alpha[basis.lifted_positions], 0.0)

        psi, _ = basis.evaluate(reference.x, reference.z)
        reconstruction = np.einsum("k,kxzi->xzi", alpha, psi)
        errors.append(math.sqrt(float(reference.integrate(np.sum((reconstruction - target) ** 2, axis=-1)))))

    assert errors[0] > errors[1] > errors[2]
    assert errors[2] < 1e-2 * errors[0]
