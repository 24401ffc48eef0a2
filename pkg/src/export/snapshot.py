"""Field snapshots on a uniform export grid.

Each snapshot holds, per export node (x_i, z_j): the reference velocity
u1, u2, the height h(x_i), the beam velocity dt_h(x_i) and the physical
sample point y_ij = h(x_i) z_j of the pushforward. ``csv`` writes one row
per node in that column order; ``npz`` stores the same columns as
(n_x, n_z) arrays plus ``t`` and ``step``.
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Union

import numpy as np

from src.assembly.mapped import apply_piola
from src.basis.basis_set import BasisSet
from src.core.state import StateVector
from src.geometry.field import GeometryField

logger = logging.getLogger(__name__)

SNAPSHOT_COLUMNS = ("x", "z", "y", "u1", "u2", "h", "dt_h")
FORMATS = ("csv", "npz")


@dataclass(frozen=True)
class FieldSnapshot:
    t: float
    step: int
    columns: Dict[str, np.ndarray]

    @property
    def shape(self) -> tuple:
        return self.columns["x"].shape


def sample_snapshot(state: StateVector, basis: BasisSet, n_x: int, n_z: int, step: int = 0) -> FieldSnapshot:
    """Evaluate the state on n_x uniform periodic x nodes and n_z nodes in [0, 1]."""
    x = np.arange(n_x) * (basis.length / n_x)
    z = np.linspace(0.0, 1.0, n_z)
    rate = basis.beam_part(state.alpha)
    geometry = GeometryField.from_modes(
        x, z, basis.beam_tables(x), state.g_mean, state.g_coeffs, rate=rate
    )
    psi, grad = basis.evaluate(x, z)
    P, dP = geometry.piola()
    phi, _ = apply_piola(P, dP, psi, grad)
    u = np.tensordot(state.alpha, phi, axes=1)

    X, Z = np.meshgrid(x, z, indexing="ij")
    H = np.broadcast_to(geometry.h[:, None], X.shape)
    columns = {
        "x": X,
        "z": Z,
        "y": H * Z,
        "u1": u[..., 0],
        "u2": u[..., 1],
        "h": H,
        "dt_h": np.broadcast_to(geometry.dt_h[:, None], X.shape),
    }
    return FieldSnapshot(t=state.t, step=step, columns={k: np.array(v) for k, v in columns.items()})


def write_snapshot(snapshot: FieldSnapshot, path: Union[str, Path], fmt: str = "csv") -> Path:
    if fmt not in FORMATS:
        raise ValueError(f"unknown snapshot format '{fmt}'")
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "npz":
        np.savez(target, t=snapshot.t, step=snapshot.step, **snapshot.columns)
        return target if target.suffix == ".npz" else target.with_name(target.name + ".npz")

    flat = [snapshot.columns[name].reshape(-1) for name in SNAPSHOT_COLUMNS]
    with target.open("w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(SNAPSHOT_COLUMNS)
        for values in zip(*flat):
            writer.writerow([repr(float(v)) for v in values])
    logger.debug("Snapshot t=%.6g written to %s", snapshot.t, target)
    return target


def read_snapshot(path: Union[str, Path]) -> Dict[str, np.ndarray]:
    """Columns of a CSV snapshot as flat arrays, or the arrays of an npz one."""
    source = Path(path)
    if source.suffix == ".npz":
        with np.load(source) as archive:
            return {name: np.array(archive[name]) for name in archive.files}
    table = np.genfromtxt(source, delimiter=",", names=True)
    return {name: np.atleast_1d(table[name]) for name in SNAPSHOT_COLUMNS}
