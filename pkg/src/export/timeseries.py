"""Time-series CSV of the energy ledger and step reports.

Column order is fixed (see ``COLUMNS``); floats are written with ``repr``
so every value reads back bit-identically.
"""

from __future__ import annotations

import csv
import logging
from pathlib import Path
from typing import Dict, IO, Iterable, List, Optional, Union

from src.core.state import StepReport
from src.diagnostics.energy import EnergyLedger

logger = logging.getLogger(__name__)

COLUMNS = (
    "step",
    "t",
    "E_kinetic_fluid",
    "E_kinetic_beam",
    "E_elastic",
    "E_total",
    "dissipation_cum",
    "balance_residual",
    "min_height",
    "picard_iterations",
    "picard_residual",
    "dt",
)

_INT_COLUMNS = {"step", "picard_iterations"}


def timeseries_row(ledger: EnergyLedger, report: Optional[StepReport], min_height: float) -> Dict[str, Union[int, float]]:
    """Merge a ledger row with the report of the step that produced it."""
    return {
        "step": ledger.step,
        "t": ledger.t,
        "E_kinetic_fluid": ledger.E_kinetic_fluid,
        "E_kinetic_beam": ledger.E_kinetic_beam,
        "E_elastic": ledger.E_elastic,
        "E_total": ledger.E_total,
        "dissipation_cum": ledger.dissipation_cum,
        "balance_residual": ledger.balance_residual,
        "min_height": min_height,
        "picard_iterations": 0 if report is None else report.picard_iterations,
        "picard_residual": 0.0 if report is None else report.picard_residual,
        "dt": 0.0 if report is None else report.dt,
    }


def _format(value: Union[int, float]) -> str:
    return str(value) if isinstance(value, int) else repr(float(value))


class TimeseriesWriter:
    """Append rows to a CSV file, one row per output step."""

    def __init__(self, path: Union[str, Path], resume_step: Optional[int] = None):
        """With ``resume_step`` existing rows up to that step are kept."""
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        kept: List[Dict[str, Union[int, float]]] = []
        if resume_step is not None and self.path.exists():
            kept = [row for row in read_timeseries(self.path) if row["step"] <= resume_step]
        self._handle: IO[str] = self.path.open("w", newline="")
        self._writer = csv.writer(self._handle)
        self._writer.writerow(COLUMNS)
        self.rows = 0
        for row in kept:
            self.write(row)

    def write(self, row: Dict[str, Union[int, float]]) -> None:
        self._writer.writerow([_format(row[name]) for name in COLUMNS])
        self.rows += 1

    def flush(self) -> None:
        self._handle.flush()

    def close(self) -> None:
        if not self._handle.closed:
            self._handle.close()
            logger.debug("Wrote %d rows to %s", self.rows, self.path)


def write_timeseries(rows: Iterable[Dict[str, Union[int, float]]], path: Union[str, Path]) -> Path:
    """Write all ``rows`` to ``path`` in one go."""
    writer = TimeseriesWriter(path)
    try:
        for row in rows:
            writer.write(row)
    finally:
        writer.close()
    return writer.path


def read_timeseries(path: Union[str, Path]) -> List[Dict[str, Union[int, float]]]:
    with Path(path).open(newline="") as handle:
        reader = csv.DictReader(handle)
        return [
            {name: int(raw) if name in _INT_COLUMNS else float(raw) for name, raw in record.items()}
            for record in reader
        ]
