"""Scenario registry and built-in initial data."""

import math

import numpy as np
import pytest

from src.core.errors import SchemaError
from src.pipeline.config import InitialConfig
from src.scenarios import InitialData, ScenarioContext, create_registry, resolve_initial
from src.scenarios.builtin import FlatScenario

pytestmark = pytest.mark.unit

X = np.linspace(0.0, 1.0, 16, endpoint=False)


def test_registry_lists_builtins():
    assert set(create_registry().names) == {"flat", "sine_perturbation", "descending", "lifted_mode", "sampled"}


def test_register_adds_a_scenario():
    registry = create_registry()

    class RaisedScenario(FlatScenario):
        name = "raised"

        def build(self, context: ScenarioContext) -> InitialData:
            return InitialData(h0=1.5, h1=0.0)

    assert registry.register(RaisedScenario) is RaisedScenario
    assert "raised" in registry.names
    assert registry.build(InitialConfig(scenario="raised"), 1.0).h0 == 1.5


def test_register_rejects_name_clash():
    registry = create_registry()

    class OtherFlat(FlatScenario):
        name = "flat"

    with pytest.raises(ValueError):
        registry.register(OtherFlat)
    registry.register(FlatScenario)


def test_unknown_scenario():
    with pytest.raises(SchemaError) as excinfo:
        resolve_initial(InitialConfig(scenario="tsunami"), 1.0)
    assert excinfo.value.field_path == "initial.scenario"


def test_flat():
    data = resolve_initial(InitialConfig(scenario="flat", params={"mean": 2.0}), 1.0)
    assert data.h0 == 2.0
    assert data.h1 == 0.0
    assert data.u0_hat is None


def test_sine_perturbation():
    data = resolve_initial(InitialConfig(scenario="sine_perturbation", params={"amplitude": 0.2, "wavenumber": 2}), 1.0)
    np.testing.assert_allclose(data.h0(X), 1.0 + 0.2 * np.cos(4.0 * math.pi * X))
    assert data.h1 == 0.0


def test_descending_moves_towards_the_wall():
    data = resolve_initial(InitialConfig(scenario="descending", params={"depth": 0.8, "speed": 3.0}), 1.0)
    h0, h1 = data.h0(X), data.h1(X)
    lowest = int(np.argmin(h0))
    assert h0[lowest] == pytest.approx(0.2)
    assert h1[lowest] == pytest.approx(-3.0)
    assert abs(float(np.mean(h1))) < 1e-14


def test_descending_rejects_depth_beyond_wall():
    with pytest.raises(SchemaError):
        resolve_initial(InitialConfig(scenario="descending", params={"depth": 1.0}), 1.0)


def test_lifted_mode():
    data = resolve_initial(InitialConfig(scenario="lifted_mode", params={"mode": 2, "amplitude": 0.5}), 1.0)
    np.testing.assert_allclose(data.h1(X), 0.5 * math.sqrt(2.0) * np.cos(2.0 * math.pi * X), atol=1e-14)


def test_lifted_mode_index_must_be_positive():
    with pytest.raises(SchemaError):
        resolve_initial(InitialConfig(scenario="lifted_mode", params={"mode": 0}), 1.0)


def test_sampled_from_csv(tmp_path):
    nodes = np.arange(32) / 32.0
    path = tmp_path / "heights.csv"
    rows = ["x,h0,h1"] + [
        f"{x!r},{1.0 + 0.1 * math.cos(2 * math.pi * x)!r},{0.05 * math.sin(2 * math.pi * x)!r}" for x in nodes
    ]
    path.write_text("\n".join(rows) + "\n")
    data = resolve_initial(InitialConfig(scenario="sampled", file=path), 1.0)
    points = np.array([0.1, 0.37, 0.9, 1.1])
    np.testing.assert_allclose(data.h0(points), 1.0 + 0.1 * np.cos(2 * math.pi * points), atol=1e-5)
    np.testing.assert_allclose(data.h1(points), 0.05 * np.sin(2 * math.pi * points), atol=1e-5)


def test_sampled_from_npz(tmp_path):
    path = tmp_path / "heights.npz"
    np.savez(path, h0=np.ones(8), h1=np.zeros(8))
    data = resolve_initial(InitialConfig(scenario="sampled", file=path), 1.0)
    np.testing.assert_allclose(data.h0(X), 1.0)


def test_sampled_requires_file(tmp_path):
    with pytest.raises(SchemaError):
        resolve_initial(InitialConfig(scenario="sampled"), 1.0)
    with pytest.raises(SchemaError):
        resolve_initial(InitialConfig(scenario="sampled", file=tmp_path / "missing.csv"), 1.0)


def test_sampled_rejects_missing_columns(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("x,h0\n0.0,1.0\n0.25,1.0\n0.5,1.0\n0.75,1.0\n")
    with pytest.raises(SchemaError):
        resolve_initial(InitialConfig(scenario="sampled", file=path), 1.0)
