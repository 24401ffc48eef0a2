"""Scenario interface and the initial data it produces."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Protocol

from src.basis.beam import HeightData
from src.basis.projection import VelocityField


@dataclass
class InitialData:
    """Initial height h0, beam velocity h1 and reference velocity u0_hat.

    ``u0_hat=None`` means the Stokes lift of h1: the velocity carried by
    the lifted modes alone.
    """

    h0: HeightData
    h1: HeightData
    u0_hat: Optional[VelocityField] = None
    description: str = ""


@dataclass
class ScenarioContext:
    """Context passed to scenario builders."""

    length: float
    params: Dict[str, Any] = field(default_factory=dict)
    file: Optional[Path] = None

    def param(self, name: str, default: Any) -> Any:
        return self.params.get(name, default)


class Scenario(Protocol):
    """Builds initial data from parameters."""

    name: str

    def build(self, context: ScenarioContext) -> InitialData:
        """Return the initial data for this scenario."""
