"""Beam modes and the initial beam projection."""

import math

import numpy as np
import pytest

from src.basis.beam import BeamBasis, build_beam_basis, project_initial_beam, sample_height

pytestmark = pytest.mark.unit


@pytest.fixture
def beam():
    return BeamBasis.build(1.0, 4)


def test_mode_ordering():
    modes = build_beam_basis(1.0, 4)
    assert [m.parity for m in modes] == ["sin", "cos", "sin", "cos"]
    assert [m.wavenumber_index for m in modes] == [1, 1, 2, 2]
    assert modes[2].kappa == pytest.approx(4.0 * math.pi)


def test_invalid_size_raises():
    with pytest.raises(ValueError):
        build_beam_basis(1.0, 0)


def test_modes_are_orthonormal_and_zero_mean(beam):
    x = np.arange(64) / 64.0
    table = beam.table(x)
    np.testing.assert_allclose(table @ table.T / 64.0, np.eye(4), atol=1e-13)
    np.testing.assert_allclose(table.sum(axis=1) / 64.0, 0.0, atol=1e-14)


def test_derivatives(beam):
    x = np.linspace(0.0, 1.0, 9)
    mode = beam.modes[1]  # sqrt(2) cos(2 pi x)
    np.testing.assert_allclose(mode.evaluate(x), math.sqrt(2.0) * np.cos(2 * math.pi * x), atol=1e-14)
    np.testing.assert_allclose(
        mode.evaluate(x, 2), -math.sqrt(2.0) * (2 * math.pi) ** 2 * np.cos(2 * math.pi * x), atol=1e-10
    )


def test_projection_recovers_cosine(beam):
    mean, coeffs = project_initial_beam(lambda x: 1.0 + 0.2 * np.cos(2 * math.pi * x), beam)
    assert mean == pytest.approx(1.0)
    np.testing.assert_allclose(coeffs, [0.0, 0.2 / math.sqrt(2.0), 0.0, 0.0], atol=1e-14)


def test_projection_from_samples(beam):
    x = np.arange(32) / 32.0
    samples = 2.0 + 0.1 * np.sin(4 * math.pi * x)
    mean, coeffs = project_initial_beam(samples, beam)
    assert mean == pytest.approx(2.0)
    np.testing.assert_allclose(coeffs, [0.0, 0.0, 0.1 / math.sqrt(2.0), 0.0], atol=1e-14)


def test_constant_projects_to_mean_only(beam):
    mean, coeffs = project_initial_beam(0.7, beam)
    assert mean == pytest.approx(0.7)
    np.testing.assert_allclose(coeffs, 0.0, atol=1e-15)


def test_h2_pairing_scales_coefficients(beam):
    h0 = lambda x: 1.0 + 0.1 * np.sin(2 * math.pi * x)  # noqa: E731
    _, l2 = project_initial_beam(h0, beam, "l2")
    _, h2 = project_initial_beam(h0, beam, "h2")
    np.testing.assert_allclose(h2, l2 * beam.h2_weights())


def test_unknown_pairing(beam):
    with pytest.raises(ValueError):
        project_initial_beam(1.0, beam, "h1")


def test_norms_and_stiffness(beam):
    kappa = 2 * math.pi
    coeffs = np.array([0.5, 0.0, 0.0, 0.0])
    assert beam.h2_norm_sq(coeffs, mean=1.0) == pytest.approx(1.0 + 0.25 * (1 + kappa**2 + kappa**4))
    weights = beam.elastic_weights(beta=2.0, alpha=0.5)
    assert weights[0] == pytest.approx(2.0 * kappa**2 + 0.5 * kappa**4)


def test_evaluate_adds_mean_to_values_only(beam):
    x = np.array([0.25])
    coeffs = np.array([1.0, 0.0, 0.0, 0.0])
    assert beam.evaluate(coeffs, x, mean=1.0)[0] == pytest.approx(1.0 + math.sqrt(2.0))
    assert beam.evaluate(coeffs, x, order=1, mean=1.0)[0] == pytest.approx(0.0, abs=1e-12)


def test_fine_grid_resolves_highest_mode():
    beam = BeamBasis.build(1.0, 40)
    assert beam.fine_grid().size >= 2 * 8 * beam.max_wavenumber
    assert BeamBasis.build(1.0, 2).fine_grid().size == 256


def test_sample_height_broadcasts_constants():
    np.testing.assert_array_equal(sample_height(1.5, np.zeros(3)), [1.5, 1.5, 1.5])
