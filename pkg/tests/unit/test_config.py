"""Configuration loading, validation, overrides and hashing."""

import json
from pathlib import Path

import pytest

from src.core.errors import SchemaError
from src.pipeline.config import (
    SimConfig,
    apply_overrides,
    config_hash,
    load_config,
    write_config,
)

pytestmark = pytest.mark.unit

REPO = Path(__file__).resolve().parents[2]


def test_defaults_are_valid():
    config = SimConfig.from_dict({})
    assert config.physics.length == 1.0
    assert config.discretization.n_pairs == 16
    assert config.initial.scenario == "flat"
    assert config.output_every == 1


def test_sections_are_coerced():
    config = SimConfig.from_dict({"time": {"dt": "0.01", "t_end": 1, "dt_halving": "yes"}, "seed": 3.0})
    assert config.time.dt == 0.01
    assert config.time.dt_halving is True
    assert config.seed == 3
    assert config.time.n_steps == 100


def test_unknown_key_names_its_path():
    with pytest.raises(SchemaError) as excinfo:
        SimConfig.from_dict({"physics": {"viscosity": 1.0}})
    assert excinfo.value.field_path == "physics.viscosity"
    assert excinfo.value.exit_code == 4


def test_unknown_section():
    with pytest.raises(SchemaError):
        SimConfig.from_dict({"solver": {}})


@pytest.mark.parametrize(
    "data, path",
    [
        ({"physics": {"mu": -1.0}}, "physics.mu"),
        ({"physics": {"rho_f": "dense"}}, "physics.rho_f"),
        ({"discretization": {"n_pairs": 2.5}}, "discretization.n_pairs"),
        ({"discretization": {"beam_projection": "h1"}}, "discretization.beam_projection"),
        ({"time": {"dt": 0.0}}, "time.dt"),
        ({"time": {"dt": 0.01, "t_end": 1.0}, "output": {"output_dt": 0.015}}, "output.output_dt"),
        ({"output": {"snapshot_format": "vtk"}}, "output.snapshot_format"),
    ],
)
def test_invalid_values(data, path):
    with pytest.raises(SchemaError) as excinfo:
        SimConfig.from_dict(data)
    assert excinfo.value.field_path == path


def test_output_cadence():
    config = SimConfig.from_dict({"time": {"dt": 0.001, "t_end": 0.1}, "output": {"output_dt": 0.01}})
    assert config.output_every == 10


def test_load_yaml(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        "physics:\n  mu: 0.5\n"
        "initial:\n  scenario: sampled\n  file: heights.csv\n"
        "discretization:\n  n_pairs: 8\n"
    )
    config = load_config(path)
    assert config.physics.mu == 0.5
    assert config.discretization.n_pairs == 8
    assert config.initial.file == (tmp_path / "heights.csv").resolve()


def test_cache_path_is_relative_to_config_file(tmp_path, monkeypatch):
    nested = tmp_path / "configs"
    nested.mkdir()
    path = nested / "run.yaml"
    path.write_text("cache: ../.cache/basis.db\n")
    monkeypatch.chdir(nested)
    assert load_config(path).cache == (tmp_path / ".cache" / "basis.db").resolve()

    absolute = tmp_path / "elsewhere.db"
    path.write_text(f"cache: {absolute}\n")
    assert load_config(path).cache == absolute

    path.write_text("cache: ':memory:'\n")
    assert str(load_config(path).cache) == ":memory:"


def test_load_json(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"time": {"dt": 0.002}}))
    assert load_config(path).time.dt == 0.002


def test_missing_file():
    with pytest.raises(FileNotFoundError):
        load_config("does/not/exist.yaml")


def test_unsupported_suffix(tmp_path):
    path = tmp_path / "run.toml"
    path.write_text("")
    with pytest.raises(SchemaError):
        load_config(path)


def test_overrides_return_new_config():
    base = SimConfig.from_dict({})
    changed = apply_overrides(base, ["physics.mu=0.25", "discretization.n_pairs=10", "output.snapshots=true"])
    assert changed.physics.mu == 0.25
    assert changed.discretization.n_pairs == 10
    assert changed.output.snapshots is True
    assert base.physics.mu == 0.1


def test_override_can_set_scenario_params():
    config = apply_overrides(SimConfig.from_dict({}), ["initial.params.amplitude=0.3"])
    assert config.initial.params == {"amplitude": 0.3}


@pytest.mark.parametrize("item", ["physics.mu", "=1", "physics.mu.value=1"])
def test_malformed_overrides(item):
    with pytest.raises(SchemaError):
        apply_overrides(SimConfig.from_dict({}), [item])


def test_hash_is_stable_and_sensitive():
    base = SimConfig.from_dict({})
    assert config_hash(base) == config_hash(SimConfig.from_dict({}))
    assert config_hash(base) != config_hash(apply_overrides(base, ["time.dt=0.002"]))


def test_write_config_round_trip(tmp_path):
    config = SimConfig.from_dict({"physics": {"beta": 2.0}, "initial": {"scenario": "descending"}})
    for name in ("out.yaml", "out.json"):
        reloaded = load_config(write_config(config, tmp_path / name))
        assert config_hash(reloaded) == config_hash(config)


@pytest.mark.parametrize("name", sorted(p.name for p in (REPO / "configs").glob("*.yaml")))
def test_shipped_configs_load(name):
    config = load_config(REPO / "configs" / name)
    assert config.time.n_steps >= 1
