"""Registered initial-data scenarios."""

from __future__ import annotations

from typing import Tuple

from src.pipeline.config import InitialConfig

from .base import InitialData, Scenario, ScenarioContext
from .builtin import (
    DescendingScenario,
    FlatScenario,
    LiftedModeScenario,
    SampledScenario,
    SinePerturbationScenario,
)
from .registry import ScenarioRegistry

_BUILTIN_SCENARIOS: Tuple[type, ...] = (
    FlatScenario,
    SinePerturbationScenario,
    DescendingScenario,
    LiftedModeScenario,
    SampledScenario,
)


def create_registry() -> ScenarioRegistry:
    registry = ScenarioRegistry()
    for scenario_cls in _BUILTIN_SCENARIOS:
        registry.register(scenario_cls)
    return registry


def resolve_initial(initial: InitialConfig, length: float) -> InitialData:
    return create_registry().build(initial, length)


__all__ = [
    "InitialData",
    "Scenario",
    "ScenarioContext",
    "ScenarioRegistry",
    "create_registry",
    "resolve_initial",
]
