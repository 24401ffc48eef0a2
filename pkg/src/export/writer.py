"""Output directory layout of a run.

    <directory>/timeseries.csv
    <directory>/snapshots/snapshot_<step>.csv|npz
    <directory>/checkpoints/checkpoint_<step>.json
    <directory>/summary.json
"""

from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional

from src.basis.basis_set import BasisSet
from src.core.state import StateVector, StepReport
from src.diagnostics.energy import EnergyLedger
from src.pipeline.config import SimConfig, config_hash

from .checkpoint import Checkpoint, save_checkpoint
from .snapshot import sample_snapshot, write_snapshot
from .timeseries import TimeseriesWriter, timeseries_row

logger = logging.getLogger(__name__)


class RunWriter:
    """Receives output and checkpoint events from the driver."""

    def __init__(self, config: SimConfig, basis: BasisSet, resume_step: Optional[int] = None):
        self.config = config
        self.basis = basis
        self.directory = Path(config.output.directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.config_hash = config_hash(config)
        self.timeseries = TimeseriesWriter(self.directory / "timeseries.csv", resume_step=resume_step)
        self.last_checkpoint: Optional[Path] = None

    def on_output(
        self,
        step: int,
        state: StateVector,
        ledger: EnergyLedger,
        report: Optional[StepReport],
        min_height: float,
    ) -> None:
        self.timeseries.write(timeseries_row(ledger, report, min_height))
        output = self.config.output
        if output.snapshots:
            snapshot = sample_snapshot(state, self.basis, output.snapshot_nx, output.snapshot_nz, step)
            suffix = "npz" if output.snapshot_format == "npz" else "csv"
            write_snapshot(
                snapshot,
                self.directory / "snapshots" / f"snapshot_{step:07d}.{suffix}",
                output.snapshot_format,
            )

    def on_checkpoint(self, step: int, state: StateVector, ledger: EnergyLedger) -> None:
        self.timeseries.flush()
        path = self.directory / "checkpoints" / f"checkpoint_{step:07d}.json"
        self.last_checkpoint = save_checkpoint(Checkpoint(self.config_hash, step, state, ledger), path)

    def write_summary(self, summary: Dict[str, Any]) -> Path:
        path = self.directory / "summary.json"
        path.write_text(json.dumps(summary, indent=2, default=str))
        return path

    def close(self) -> None:
        self.timeseries.close()
