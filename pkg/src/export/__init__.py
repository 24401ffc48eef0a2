"""Writers for time series, field snapshots and checkpoints."""

from .checkpoint import FORMAT_VERSION, Checkpoint, load_checkpoint, save_checkpoint
from .snapshot import FieldSnapshot, read_snapshot, sample_snapshot, write_snapshot
from .timeseries import COLUMNS, TimeseriesWriter, read_timeseries, timeseries_row, write_timeseries
from .writer import RunWriter

__all__ = [
    "Checkpoint",
    "FORMAT_VERSION",
    "load_checkpoint",
    "save_checkpoint",
    "FieldSnapshot",
    "sample_snapshot",
    "write_snapshot",
    "read_snapshot",
    "COLUMNS",
    "TimeseriesWriter",
    "timeseries_row",
    "write_timeseries",
    "read_timeseries",
    "RunWriter",
]
