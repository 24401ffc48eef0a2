"""Picard stepping and the dt-halving retry."""

import numpy as np
import pytest

from src.core.errors import PicardDivergence
from src.core.state import StepReport
from src.integrator import stepper
from src.integrator.stepper import Assembler, StepScheme, step

pytestmark = pytest.mark.unit


@pytest.fixture(scope="module")
def assembler(basis, grid, physics):
    return Assembler(basis, grid, physics)


@pytest.fixture
def tried(monkeypatch):
    """Replace the single step by one that only converges for dt <= limit."""
    calls = []

    def install(limit: float):
        def single_step(state, assembler, dt, scheme):
            calls.append(dt)
            if dt > limit:
                raise PicardDivergence(f"no convergence at dt={dt}", residual=1.0, dt=dt)
            report = StepReport(
                picard_iterations=3, picard_residual=1e-12, dt=dt, min_height=0.9, dissipation=dt
            )
            return state.replace(t=state.t + dt), report

        monkeypatch.setattr(stepper, "_single_step", single_step)
        return calls

    return install


def test_rest_state_converges_in_one_sweep(rest_state, assembler):
    new_state, report = step(rest_state, assembler, 0.01, StepScheme())
    np.testing.assert_array_equal(new_state.alpha, 0.0)
    assert new_state.t == 0.01
    assert report.picard_iterations == 1
    assert report.halvings == 0


def test_sweep_cap_raises_with_residual(state, assembler):
    scheme = StepScheme(max_iter=1)
    with pytest.raises(PicardDivergence) as excinfo:
        step(state, assembler, 0.01, scheme)
    assert excinfo.value.details["residual"] > scheme.tol
    assert excinfo.value.details["dt"] == 0.01
    assert "after 1 sweeps" in str(excinfo.value)


def test_failed_step_recovers_as_two_half_steps(rest_state, assembler, tried):
    calls = tried(0.03)
    new_state, report = step(rest_state, assembler, 0.05, StepScheme(dt_halving=True, dt_min=1e-6))

    assert calls == [0.05, 0.025, 0.025]
    assert new_state.t == 0.05
    assert report.halvings == 1
    assert report.dt == 0.025
    assert report.picard_iterations == 6
    assert report.dissipation == pytest.approx(0.05)


def test_halving_recurses_until_the_step_converges(rest_state, assembler, tried):
    calls = tried(0.01)
    new_state, report = step(rest_state, assembler, 0.05, StepScheme(dt_halving=True, dt_min=1e-6))

    assert min(calls) == 0.00625
    assert report.halvings == 3
    assert report.dt == 0.00625
    assert report.picard_iterations == 8 * 3
    assert new_state.t == 0.05


def test_halving_stops_at_dt_min(rest_state, assembler, tried):
    calls = tried(0.01)
    with pytest.raises(PicardDivergence) as excinfo:
        step(rest_state, assembler, 0.05, StepScheme(dt_halving=True, dt_min=0.02))

    assert calls == [0.05, 0.025]
    assert excinfo.value.details["dt"] == 0.025
    assert min(calls) >= 0.02


def test_without_halving_the_failure_propagates(rest_state, assembler, tried):
    calls = tried(0.01)
    with pytest.raises(PicardDivergence):
        step(rest_state, assembler, 0.05, StepScheme(dt_halving=False))
    assert calls == [0.05]
