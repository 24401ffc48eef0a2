"""Versioned JSON checkpoints.

Layout::

    {
      "format": "fsi-beam-checkpoint",
      "version": 1,
      "config_hash": "<sha256 of the canonical config>",
      "step": <steps taken>,
      "state": {"t", "alpha", "g_coeffs", "g_mean"},
      "ledger": {EnergyLedger fields}
    }

JSON floats use the shortest round-trip representation, so a restored
state is bit-identical to the saved one.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from src.core.errors import SchemaError, VersionMismatch
from src.core.state import StateVector
from src.diagnostics.energy import EnergyLedger

logger = logging.getLogger(__name__)

FORMAT_NAME = "fsi-beam-checkpoint"
FORMAT_VERSION = 1


@dataclass(frozen=True)
class Checkpoint:
    config_hash: str
    step: int
    state: StateVector
    ledger: EnergyLedger

    def to_dict(self) -> dict:
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "config_hash": self.config_hash,
            "step": self.step,
            "state": self.state.to_dict(),
            "ledger": self.ledger.to_dict(),
        }


def save_checkpoint(checkpoint: Checkpoint, path: Union[str, Path]) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    staging = target.with_name(target.name + ".tmp")
    staging.write_text(json.dumps(checkpoint.to_dict(), indent=2))
    staging.replace(target)
    logger.info("Checkpoint at step %d (t=%.6g) written to %s", checkpoint.step, checkpoint.state.t, target)
    return target


def load_checkpoint(path: Union[str, Path], expected_hash: Optional[str] = None) -> Checkpoint:
    """Read a checkpoint; with ``expected_hash`` the config must match."""
    source = Path(path)
    if not source.exists():
        raise FileNotFoundError(f"Checkpoint not found: {source}")
    try:
        data = json.loads(source.read_text())
    except json.JSONDecodeError as exc:
        raise SchemaError(f"{source}: not a JSON checkpoint ({exc})") from exc

    if data.get("format") != FORMAT_NAME:
        raise VersionMismatch(f"{source}: not a {FORMAT_NAME} file")
    if data.get("version") != FORMAT_VERSION:
        raise VersionMismatch(
            f"{source}: checkpoint version {data.get('version')!r}, expected {FORMAT_VERSION}",
            found=data.get("version"),
        )
    if expected_hash is not None and data.get("config_hash") != expected_hash:
        raise VersionMismatch(
            f"{source}: checkpoint was written for a different configuration",
            found=data.get("config_hash"),
            expected=expected_hash,
        )
    try:
        return Checkpoint(
            config_hash=str(data["config_hash"]),
            step=int(data["step"]),
            state=StateVector.from_dict(data["state"]),
            ledger=EnergyLedger.from_dict(data["ledger"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"{source}: malformed checkpoint ({exc})") from exc
