"""Shared fixtures: a small coupled basis on its production quadrature grid."""

from __future__ import annotations

import numpy as np
import pytest

from src.assembly.quadrature import build_quadrature
from src.basis.basis_set import build_basis_set
from src.core.state import StateVector
from src.pipeline.config import DiscretizationConfig, PhysicsConfig

SMALL_N = 6


@pytest.fixture(scope="session")
def physics():
    return PhysicsConfig()


@pytest.fixture(scope="session")
def basis(physics):
    return build_basis_set(physics.length, SMALL_N)


@pytest.fixture(scope="session")
def grid(basis, physics):
    n_x, n_z = DiscretizationConfig(n_pairs=SMALL_N).grid_sizes(
        basis.max_wavenumber, basis.max_z_degree, physics.length
    )
    return build_quadrature(physics.length, n_x, n_z, basis.max_wavenumber, basis.max_z_degree)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def state(basis, rng):
    """A mildly deformed, moving state."""
    return StateVector(
        t=0.0,
        alpha=rng.uniform(-0.3, 0.3, basis.n_pairs),
        g_coeffs=rng.uniform(-0.03, 0.03, basis.n_beam),
        g_mean=1.0,
    )


@pytest.fixture
def rest_state(basis):
    return StateVector(t=0.0, alpha=np.zeros(basis.n_pairs), g_coeffs=np.zeros(basis.n_beam), g_mean=1.0)
