"""Time-series CSV, checkpoints and field snapshots."""

import json

import numpy as np
import pytest

from src.core.errors import SchemaError, VersionMismatch
from src.core.state import StateVector, StepReport
from src.diagnostics.energy import EnergyLedger
from src.export.checkpoint import FORMAT_VERSION, Checkpoint, load_checkpoint, save_checkpoint
from src.export.snapshot import SNAPSHOT_COLUMNS, read_snapshot, sample_snapshot, write_snapshot
from src.export.timeseries import COLUMNS, TimeseriesWriter, read_timeseries, timeseries_row, write_timeseries

pytestmark = pytest.mark.unit


def _ledger(step: int, t: float) -> EnergyLedger:
    return EnergyLedger(
        step=step,
        t=t,
        E_kinetic_fluid=0.1 + step,
        E_kinetic_beam=1.0 / 3.0,
        E_elastic=2.0 ** -40,
        E_total=1.5,
        E_initial=1.5,
        dissipation_cum=0.01 * step,
        balance_residual=1e-17 * step,
    )


def _rows(count: int):
    report = StepReport(picard_iterations=4, picard_residual=3e-12, dt=0.01, min_height=0.9)
    return [timeseries_row(_ledger(n, 0.01 * n), report if n else None, 0.9 - 0.001 * n) for n in range(count)]


def test_timeseries_round_trip_is_exact(tmp_path):
    rows = _rows(4)
    path = write_timeseries(rows, tmp_path / "ts.csv")
    assert path.read_text().splitlines()[0] == ",".join(COLUMNS)
    assert read_timeseries(path) == rows


def test_initial_row_has_no_step_report(tmp_path):
    row = _rows(1)[0]
    assert row["picard_iterations"] == 0
    assert row["dt"] == 0.0


def test_resumed_timeseries_keeps_earlier_rows(tmp_path):
    path = tmp_path / "ts.csv"
    write_timeseries(_rows(5), path)
    writer = TimeseriesWriter(path, resume_step=2)
    writer.write(_rows(4)[3])
    writer.close()
    assert [row["step"] for row in read_timeseries(path)] == [0, 1, 2, 3]


@pytest.fixture
def checkpoint():
    state = StateVector(t=0.30000000000000004, alpha=[0.1, -1e-300, 1.0 / 7.0], g_coeffs=[np.pi, np.e], g_mean=0.95)
    return Checkpoint(config_hash="abc", step=30, state=state, ledger=_ledger(30, state.t))


def test_checkpoint_round_trip_is_bit_exact(tmp_path, checkpoint):
    path = save_checkpoint(checkpoint, tmp_path / "checkpoints" / "c.json")
    restored = load_checkpoint(path, expected_hash="abc")
    assert restored.step == 30
    assert restored.state.t == checkpoint.state.t
    np.testing.assert_array_equal(restored.state.alpha, checkpoint.state.alpha)
    np.testing.assert_array_equal(restored.state.g_coeffs, checkpoint.state.g_coeffs)
    assert restored.state.g_mean == checkpoint.state.g_mean
    assert restored.ledger == checkpoint.ledger


def test_checkpoint_for_other_config(tmp_path, checkpoint):
    path = save_checkpoint(checkpoint, tmp_path / "c.json")
    with pytest.raises(VersionMismatch):
        load_checkpoint(path, expected_hash="other")


def test_checkpoint_version_mismatch(tmp_path, checkpoint):
    path = tmp_path / "c.json"
    data = checkpoint.to_dict()
    data["version"] = FORMAT_VERSION + 1
    path.write_text(json.dumps(data))
    with pytest.raises(VersionMismatch) as excinfo:
        load_checkpoint(path)
    assert excinfo.value.exit_code == 4


def test_checkpoint_malformed(tmp_path, checkpoint):
    path = tmp_path / "c.json"
    path.write_text("{not json")
    with pytest.raises(SchemaError):
        load_checkpoint(path)
    data = checkpoint.to_dict()
    del data["state"]
    path.write_text(json.dumps(data))
    with pytest.raises(SchemaError):
        load_checkpoint(path)


def test_missing_checkpoint(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_checkpoint(tmp_path / "none.json")


def test_snapshot_columns(state, basis):
    snapshot = sample_snapshot(state, basis, 8, 5, step=3)
    assert snapshot.shape == (8, 5)
    assert set(snapshot.columns) == set(SNAPSHOT_COLUMNS)
    np.testing.assert_allclose(snapshot.columns["y"], snapshot.columns["h"] * snapshot.columns["z"])
    # no-slip at the bottom, beam velocity at the top
    np.testing.assert_allclose(snapshot.columns["u1"][:, 0], 0.0, atol=1e-12)
    np.testing.assert_allclose(snapshot.columns["u2"][:, -1], snapshot.columns["dt_h"][:, -1], atol=1e-12)


def test_snapshot_csv(tmp_path, state, basis):
    snapshot = sample_snapshot(state, basis, 6, 4)
    path = write_snapshot(snapshot, tmp_path / "s.csv", "csv")
    columns = read_snapshot(path)
    np.testing.assert_array_equal(columns["u2"], snapshot.columns["u2"].reshape(-1))


def test_snapshot_npz(tmp_path, state, basis):
    snapshot = sample_snapshot(state, basis, 6, 4, step=12)
    path = write_snapshot(snapshot, tmp_path / "s.npz", "npz")
    columns = read_snapshot(path)
    assert int(columns["step"]) == 12
    np.testing.assert_array_equal(columns["h"], snapshot.columns["h"])


def test_snapshot_unknown_format(tmp_path, state, basis):
    with pytest.raises(ValueError):
        write_snapshot(sample_snapshot(state, basis, 4, 2), tmp_path / "s.vtk", "vtk")
