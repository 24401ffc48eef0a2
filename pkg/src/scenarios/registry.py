"""Scenario registry resolving configured names to initial data."""

from __future__ import annotations

import logging
from typing import Dict, Optional, Sequence

from src.core.errors import SchemaError
from src.pipeline.config import InitialConfig

from .base import InitialData, Scenario, ScenarioContext

logger = logging.getLogger(__name__)


class ScenarioRegistry:
    """Instantiate scenarios by name."""

    def __init__(self, available: Optional[Dict[str, type]] = None):
        self.available: Dict[str, type] = dict(available or {})

    @property
    def names(self) -> Sequence[str]:
        return tuple(sorted(self.available))

    def register(self, scenario_cls: type) -> type:
        name = getattr(scenario_cls, "name", "")
        if not name:
            raise ValueError(f"{scenario_cls.__name__} has no scenario name")
        if name in self.available and self.available[name] is not scenario_cls:
            raise ValueError(f"scenario '{name}' is already registered")
        self.available[name] = scenario_cls
        logger.debug("Registered scenario %s", name)
        return scenario_cls

    def get(self, name: str) -> Scenario:
        scenario_cls = self.available.get(name)
        if scenario_cls is None:
            raise SchemaError(
                f"initial.scenario: unknown scenario '{name}' (known: {', '.join(self.names)})",
                "initial.scenario",
            )
        return scenario_cls()

    def build(self, initial: InitialConfig, length: float) -> InitialData:
        scenario = self.get(initial.scenario)
        context = ScenarioContext(length=length, params=dict(initial.params), file=initial.file)
        data = scenario.build(context)
        logger.info("Initial data: %s", data.description or scenario.name)
        return data
