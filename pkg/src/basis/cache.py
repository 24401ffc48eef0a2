"""SQLite cache for interior orthonormalization matrices and lift profiles.

Layout (schema version in ``meta``)::

    meta(key TEXT PRIMARY KEY, value TEXT)
    transforms(
        basis_key TEXT,            -- "L|M|N_z|quadrature order"
        wavenumber INTEGER,        -- m of the (m, parity) block
        parity TEXT,               -- 'cos' | 'sin'
        matrix TEXT,               -- JSON list of rows, shortest round-trip floats
        PRIMARY KEY (basis_key, wavenumber, parity)
    )
    lifts(
        basis_key TEXT,
        beam_index INTEGER,        -- index of the lifted beam mode
        coeffs TEXT,               -- JSON list of the four profile coefficients
        PRIMARY KEY (basis_key, beam_index)
    )

A cache written by a different schema version is cleared on open.
"""

from __future__ import annotations

import json
import logging
import sqlite3
from pathlib import Path
from typing import TYPE_CHECKING, Dict, Tuple

import numpy as np

if TYPE_CHECKING:
    from .basis_set import BasisLayout

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "2"


def basis_key(layout: "BasisLayout") -> str:
    # Gram-Schmidt rule order: exact for streamfunction degree N_z + 3
    quadrature_order = layout.profiles + 5
    return f"{layout.length!r}|{layout.max_wavenumber}|{layout.profiles}|{quadrature_order}"


class BasisCache:
    """Persist per-block Gram-Schmidt matrices and lift profiles across runs."""

    def __init__(self, db_path: str | Path = ".cache/basis.db"):
        self.db_path = Path(db_path)
        if str(db_path) != ":memory:":
            self.db_path.parent.mkdir(parents=True, exist_ok=True)

        self.conn = sqlite3.connect(str(db_path), timeout=30.0)
        self.conn.row_factory = sqlite3.Row
        self.conn.execute("PRAGMA synchronous=NORMAL")
        self._create_tables()
        self._check_version()

    def _create_tables(self) -> None:
        self.conn.execute(
            """
            CREATE TABLE IF NOT EXISTS meta (
                key TEXT PRIMARY KEY,
                value TEXT NOT NULL
            )
            """
        )
        self.conn.execute(
            """
            CREATE TABLE IF NOT EXISTS transforms (
                basis_key TEXT NOT NULL,
                wavenumber INTEGER NOT NULL,
                parity TEXT NOT NULL,
                matrix TEXT NOT NULL,
                PRIMARY KEY (basis_key, wavenumber, parity)
            )
            """
        )
        self.conn.execute(
            """
            CREATE TABLE IF NOT EXISTS lifts (
                basis_key TEXT NOT NULL,
                beam_index INTEGER NOT NULL,
                coeffs TEXT NOT NULL,
                PRIMARY KEY (basis_key, beam_index)
            )
            """
        )
        self.conn.commit()

    def _check_version(self) -> None:
        row = self.conn.execute("SELECT value FROM meta WHERE key = 'schema_version'").fetchone()
        if row is not None and row["value"] != SCHEMA_VERSION:
            logger.warning(
                "Basis cache %s has schema %s (expected %s); clearing it.",
                self.db_path,
                row["value"],
                SCHEMA_VERSION,
            )
            self.conn.execute("DELETE FROM transforms")
            self.conn.execute("DELETE FROM lifts")
        self.conn.execute(
            "INSERT OR REPLACE INTO meta (key, value) VALUES ('schema_version', ?)",
            (SCHEMA_VERSION,),
        )
        self.conn.commit()

    def load(self, layout: "BasisLayout") -> Dict[Tuple[int, str], np.ndarray]:
        rows = self.conn.execute(
            "SELECT wavenumber, parity, matrix FROM transforms WHERE basis_key = ?",
            (basis_key(layout),),
        ).fetchall()
        found = {(row["wavenumber"], row["parity"]): np.array(json.loads(row["matrix"])) for row in rows}
        if found:
            logger.debug("Basis cache hit: %d blocks for %s", len(found), basis_key(layout))
        return found

    def store(self, layout: "BasisLayout", transforms: Dict[Tuple[int, str], np.ndarray]) -> None:
        key = basis_key(layout)
        self.conn.executemany(
            "INSERT OR REPLACE INTO transforms (basis_key, wavenumber, parity, matrix) VALUES (?, ?, ?, ?)",
            [
                (key, int(m), parity, json.dumps(np.asarray(matrix).tolist()))
                for (m, parity), matrix in transforms.items()
            ],
        )
        self.conn.commit()

    def load_lifts(self, layout: "BasisLayout") -> Dict[int, np.ndarray]:
        rows = self.conn.execute(
            "SELECT beam_index, coeffs FROM lifts WHERE basis_key = ?",
            (basis_key(layout),),
        ).fetchall()
        return {row["beam_index"]: np.array(json.loads(row["coeffs"])) for row in rows}

    def store_lifts(self, layout: "BasisLayout", lifts: Dict[int, np.ndarray]) -> None:
        key = basis_key(layout)
        self.conn.executemany(
            "INSERT OR REPLACE INTO lifts (basis_key, beam_index, coeffs) VALUES (?, ?, ?)",
            [(key, int(index), json.dumps(np.asarray(coeffs).tolist())) for index, coeffs in lifts.items()],
        )
        self.conn.commit()

    def count(self) -> int:
        return int(self.conn.execute("SELECT COUNT(*) FROM transforms").fetchone()[0])

    def lift_count(self) -> int:
        return int(self.conn.execute("SELECT COUNT(*) FROM lifts").fetchone()[0])

    def close(self) -> None:
        self.conn.close()
