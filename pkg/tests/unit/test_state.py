"""State vector and step report."""

from dataclasses import FrozenInstanceError, fields

import numpy as np
import pytest

from src.core.state import StateVector, StepReport

pytestmark = pytest.mark.unit


def test_state_arrays_are_read_only(state):
    with pytest.raises(ValueError):
        state.alpha[0] = 1.0
    with pytest.raises(FrozenInstanceError):
        state.t = 1.0


def test_replace_keeps_other_fields(state):
    later = state.replace(t=0.5)
    assert later.t == 0.5
    np.testing.assert_array_equal(later.alpha, state.alpha)
    assert later.g_mean == state.g_mean


def test_from_dict_restores_state(state):
    restored = StateVector.from_dict(state.to_dict())
    np.testing.assert_array_equal(restored.g_coeffs, state.g_coeffs)
    assert restored.t == state.t


def test_step_report_holds_scalars_only():
    report = StepReport(picard_iterations=3, picard_residual=1e-12, dt=0.01, min_height=0.8)
    assert [f.name for f in fields(report)] == [
        "picard_iterations",
        "picard_residual",
        "dt",
        "min_height",
        "energy_residual",
        "dissipation",
        "halvings",
    ]
    assert report.halvings == 0
