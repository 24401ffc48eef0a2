"""End-to-end runs of the driver on small bases."""

from pathlib import Path

import numpy as np
import pytest

from src.core.errors import InsufficientWindow, PicardDivergence
from src.diagnostics.budget import norm_budget
from src.export.checkpoint import load_checkpoint
from src.export.timeseries import read_timeseries
from src.export.writer import RunWriter
from src.geometry.monitors import bound_holds
from src.integrator import differentiated_residual, prepare, run
from src.pipeline.config import SimConfig, apply_overrides, load_config
from src.verification.suites import VerifyContext, energy_suite

pytestmark = pytest.mark.integration

REPO = Path(__file__).resolve().parents[2]


def small_config(scenario: str, params: dict, tmp_path: Path, **time) -> SimConfig:
    return SimConfig.from_dict(
        {
            "discretization": {"n_pairs": 6},
            "time": {"dt": 0.002, "t_end": 0.02, **time},
            "initial": {"scenario": scenario, "params": params},
            "output": {"directory": str(tmp_path / "out")},
        }
    )


def test_flat_rest_state_stays_at_rest(tmp_path):
    config = small_config("flat", {}, tmp_path, dt=0.01, t_end=0.05)
    result = run(config, progress=False)

    assert result.status == "completed"
    assert result.steps_taken == 5
    assert len(result.trajectory) == 6
    np.testing.assert_array_equal(result.final_state.alpha, 0.0)
    np.testing.assert_array_equal(result.final_state.g_coeffs, 0.0)
    assert all(row.E_total == 0.0 for row in result.trajectory.ledger)
    assert result.summary()["min_height"] == pytest.approx(1.0)
    assert result.summary()["max_picard_iterations"] == 1


@pytest.mark.slow
def test_flat_rest_state_stays_at_rest_for_ten_thousand_steps(tmp_path):
    config = apply_overrides(
        small_config("flat", {}, tmp_path, dt=0.001, t_end=10.0), ["output.output_dt=1.0"]
    )
    result = run(config, progress=False)

    assert result.status == "completed"
    assert result.steps_taken == 10_000
    assert len(result.trajectory) == 11
    for state in result.trajectory.states:
        np.testing.assert_array_equal(state.alpha, 0.0)
        np.testing.assert_array_equal(state.g_coeffs, 0.0)
    assert result.final_state.t == pytest.approx(10.0)
    assert max(abs(row.balance_residual) for row in result.trajectory.ledger) == 0.0
    assert result.summary()["max_picard_iterations"] == 1


def test_released_bump_balances_energy(tmp_path):
    config = small_config("sine_perturbation", {"amplitude": 0.1}, tmp_path)
    result = run(config, progress=False)
    trajectory = result.trajectory

    assert result.status == "completed"
    assert len(trajectory) == 11
    initial = trajectory.ledger[0].E_initial
    assert initial > 0.0
    assert max(abs(row.balance_residual) for row in trajectory.ledger) < 1e-3 * initial
    assert trajectory.ledger[-1].dissipation_cum > 0.0
    assert all(report.violations() == {} for report in trajectory.compatibility)
    assert all(state.g_mean == trajectory.g_mean for state in trajectory.states)
    assert trajectory.final.t == pytest.approx(0.02)


def test_initial_acceleration_is_solved(tmp_path):
    simulation = prepare(small_config("sine_perturbation", {"amplitude": 0.1}, tmp_path))
    assert simulation.acceleration.residual < 1e-10
    assert simulation.acceleration.dtt_g_norm > 0.0
    assert simulation.delta == pytest.approx(0.9)
    assert simulation.contact_bound > 0.0


def test_norm_budget_and_differentiated_residual(tmp_path):
    config = small_config("sine_perturbation", {"amplitude": 0.1}, tmp_path)
    result = run(config, progress=False)
    sim = result.simulation

    budget = norm_budget(result.trajectory, sim.basis, sim.grid, config.physics, h_min=config.time.h_floor)
    assert not budget.blow_up
    assert not budget.below_h_min
    assert budget.min_height == pytest.approx(0.9, abs=0.05)
    assert budget.unmonitored

    series = differentiated_residual(result.trajectory, sim.basis, sim.grid, config.physics)
    assert series.norms.shape == (len(result.trajectory) - 2,)
    assert series.spacing == pytest.approx(config.time.dt)
    assert np.all(np.isfinite(series.norms))
    assert series.max < 1e-2


def test_differentiated_residual_needs_three_states(tmp_path):
    config = small_config("flat", {}, tmp_path, dt=0.01, t_end=0.01)
    result = run(config, progress=False)
    sim = result.simulation
    with pytest.raises(InsufficientWindow):
        differentiated_residual(result.trajectory, sim.basis, sim.grid, config.physics)


def test_descending_beam_reaches_contact_after_the_bound(tmp_path):
    config = small_config(
        "descending", {"depth": 0.9, "speed": 6.0}, tmp_path, t_end=0.2, h_floor=0.05, dt_halving=True
    )
    result = run(config, progress=False)

    assert result.status == "contact"
    assert result.contact.exit_code == 2
    assert result.contact_time >= result.simulation.contact_bound
    assert min(result.trajectory.min_heights) > config.time.h_floor


def _picard_failure_config(tmp_path: Path, *overrides: str) -> SimConfig:
    config = load_config(REPO / "configs" / "picard_failure.yaml")
    return apply_overrides(config, [f"output.directory={tmp_path}", *overrides])


def test_picard_failure_is_annotated(tmp_path):
    config = _picard_failure_config(tmp_path)
    with pytest.raises(PicardDivergence) as excinfo:
        run(config, progress=False)
    assert excinfo.value.exit_code == 3
    assert excinfo.value.step_index == 0
    assert excinfo.value.last_state.t == 0.0
    assert excinfo.value.details["residual"] > config.time.picard_tol
    assert excinfo.value.details["dt"] == config.time.dt
    assert f"after {config.time.picard_max_iter} sweeps" in str(excinfo.value)


def test_picard_failure_comes_from_the_sweep_cap(tmp_path):
    result = run(_picard_failure_config(tmp_path, "time.picard_max_iter=25"), progress=False)
    assert result.status == "completed"
    assert result.summary()["max_picard_iterations"] > 2
    assert result.summary()["max_halvings"] == 0


def test_large_steps_recover_by_halving(tmp_path):
    config = _picard_failure_config(
        tmp_path, "time.dt=0.05", "time.t_end=0.1", "time.picard_max_iter=4", "time.dt_halving=true"
    )
    result = run(config, progress=False)
    reports = [r for r in result.trajectory.reports if r is not None]

    assert result.status == "completed"
    assert result.final_state.t == pytest.approx(0.1)
    assert max(r.halvings for r in reports) >= 1
    assert min(r.dt for r in reports) < 0.05
    assert all(r.picard_residual <= config.time.picard_tol for r in reports)


def test_resume_reproduces_the_uninterrupted_run(tmp_path):
    config = small_config("sine_perturbation", {"amplitude": 0.1}, tmp_path)
    config = apply_overrides(config, ["output.checkpoint_every=5"])
    simulation = prepare(config)

    writer = RunWriter(config, simulation.basis)
    try:
        full = run(config, simulation=simulation, observer=writer, progress=False)
    finally:
        writer.close()
    checkpoint_path = writer.directory / "checkpoints" / "checkpoint_0000005.json"
    checkpoint = load_checkpoint(checkpoint_path, expected_hash=writer.config_hash)
    assert checkpoint.step == 5

    resumed_writer = RunWriter(config, simulation.basis, resume_step=checkpoint.step)
    try:
        resumed = run(config, simulation=simulation, resume=checkpoint, observer=resumed_writer, progress=False)
    finally:
        resumed_writer.close()

    np.testing.assert_array_equal(resumed.final_state.alpha, full.final_state.alpha)
    np.testing.assert_array_equal(resumed.final_state.g_coeffs, full.final_state.g_coeffs)
    assert resumed.final_ledger == full.final_ledger
    steps = [row["step"] for row in read_timeseries(writer.directory / "timeseries.csv")]
    assert steps == list(range(11))


@pytest.mark.slow
def test_energy_balance_converges_at_second_order():
    result = energy_suite(VerifyContext())
    assert result.passed, result.info
    checks = {check.name: check for check in result.checks}
    assert checks["max balance residual at the finest dt"].value <= 1e-6
    assert checks["observed order of the balance residual"].value >= 1.9


@pytest.mark.slow
def test_bundled_bump_keeps_the_energy_balance(tmp_path):
    config = apply_overrides(
        load_config(REPO / "configs" / "sine_perturbation.yaml"),
        [f"output.directory={tmp_path}", f"cache={tmp_path / 'basis.db'}"],
    )
    result = run(config, progress=False)

    assert result.status == "completed"
    assert result.final_state.t == pytest.approx(0.5)
    assert max(abs(row.balance_residual) for row in result.trajectory.ledger) <= 1e-6


@pytest.mark.slow
@pytest.mark.parametrize("name", ["descending_1.yaml", "descending_2.yaml", "descending_3.yaml"])
def test_bundled_descending_runs_respect_the_contact_bound(name):
    config = load_config(REPO / "configs" / name)
    simulation = prepare(config)
    result = run(config, simulation=simulation, progress=False)

    assert result.status in ("completed", "contact")
    assert bound_holds(result.contact_time, simulation.contact_bound)
    assert min(result.trajectory.min_heights) > config.time.h_floor
