"""Coupled fluid/beam basis pairs (Psi_k, psi_k) in the global enumeration.

Global position p (0-based) even holds a lifted pair (Psi, psi != 0),
odd holds an interior pair (Psi, 0); in 1-based numbering k = p + 1 this
is "odd k lifted, even k interior". With N pairs there are ceil(N/2)
lifted and floor(N/2) interior modes.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.errors import InvalidResolution

from .beam import BeamBasis
from .fluid import FluidMode, build_interior_basis, build_lifted_mode, interior_order_key

if TYPE_CHECKING:
    from src.assembly.quadrature import QuadratureGrid

    from .cache import BasisCache

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModeTable:
    """Basis values on a quadrature grid.

    psi: (N, n_x, n_z, 2); grad: (N, n_x, n_z, 2, 2) with [.., i, d];
    beam, beam_dx, beam_dxx: (N, n_x), identically zero on interior rows.
    """

    psi: np.ndarray
    grad: np.ndarray
    beam: np.ndarray
    beam_dx: np.ndarray
    beam_dxx: np.ndarray


@dataclass(frozen=True)
class BasisLayout:
    """Sizes that identify a basis (used as the cache key)."""

    length: float
    n_pairs: int
    n_lifted: int
    n_interior: int
    max_wavenumber: int
    profiles: int


def default_layout(
    length: float,
    n_pairs: int,
    max_wavenumber: Optional[int] = None,
    profiles: Optional[int] = None,
) -> BasisLayout:
    if n_pairs < 2:
        raise InvalidResolution(f"need at least 2 basis pairs, got {n_pairs}")
    n_lifted = (n_pairs + 1) // 2
    n_interior = n_pairs // 2
    if max_wavenumber is None:
        max_wavenumber = max(1, (n_lifted + 1) // 2)
    if profiles is None:
        profiles = max(2, math.ceil(n_interior / (2 * max_wavenumber + 1)))
    pool = (2 * max_wavenumber + 1) * profiles
    if pool < n_interior:
        raise InvalidResolution(
            f"interior pool of {pool} modes (M={max_wavenumber}, N_z={profiles}) "
            f"cannot supply {n_interior} interior pairs"
        )
    return BasisLayout(
        length=float(length),
        n_pairs=n_pairs,
        n_lifted=n_lifted,
        n_interior=n_interior,
        max_wavenumber=max_wavenumber,
        profiles=profiles,
    )


class BasisSet:
    """Ordered coupled pairs plus the tables the assembly consumes."""

    def __init__(self, layout: BasisLayout, beam: BeamBasis, modes: Sequence[FluidMode]):
        self.layout = layout
        self.length = layout.length
        self.beam = beam
        self.modes: Tuple[FluidMode, ...] = tuple(modes)
        self.is_lifted = np.array([mode.is_lifted for mode in self.modes])
        self.lifted_positions = np.flatnonzero(self.is_lifted)
        self.interior_positions = np.flatnonzero(~self.is_lifted)
        self._tables: Dict[Tuple[int, int, float], ModeTable] = {}

    # Sizes ----------------------------------------------------------------

    @property
    def n_pairs(self) -> int:
        return len(self.modes)

    @property
    def n_beam(self) -> int:
        return len(self.beam)

    @property
    def max_wavenumber(self) -> int:
        return max(mode.wavenumber_index for mode in self.modes)

    @property
    def max_z_degree(self) -> int:
        degrees = [mode.profile.degree for mode in self.modes if not mode.is_lifted]
        return max(degrees) if degrees else 0

    # Coefficient maps -----------------------------------------------------

    def lift(self, beam_coeffs: np.ndarray) -> np.ndarray:
        """Embed beam coefficients (length K) into a global N-vector."""
        out = np.zeros(self.n_pairs)
        out[self.lifted_positions] = beam_coeffs
        return out

    def beam_part(self, alpha: np.ndarray) -> np.ndarray:
        """Beam velocity coefficients dt g carried by alpha."""
        return np.asarray(alpha, dtype=float)[self.lifted_positions]

    # Tabulation -----------------------------------------------------------

    def evaluate(self, x: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        pairs = [mode.evaluate(x, z) for mode in self.modes]
        return np.stack([p[0] for p in pairs]), np.stack([p[1] for p in pairs])

    def beam_rows(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        """Beam traces psi_k (or derivatives) for all N pairs, shaped (N, n_x)."""
        rows = np.zeros((self.n_pairs, np.size(x)))
        rows[self.lifted_positions] = self.beam.table(x, order)
        return rows

    def tabulate(self, grid: QuadratureGrid) -> ModeTable:
        key = (grid.n_x, grid.n_z, grid.length)
        table = self._tables.get(key)
        if table is None:
            psi, grad = self.evaluate(grid.x, grid.z)
            table = ModeTable(
                psi=psi,
                grad=grad,
                beam=self.beam_rows(grid.x, 0),
                beam_dx=self.beam_rows(grid.x, 1),
                beam_dxx=self.beam_rows(grid.x, 2),
            )
            self._tables[key] = table
        return table

    def beam_tables(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        return self.beam.tables(x)

    # Gram matrices --------------------------------------------------------

    def gram_l2(self, grid: QuadratureGrid) -> np.ndarray:
        psi = self.tabulate(grid).psi
        return np.einsum("kxzi,jxzi,xz->kj", psi, psi, grid.weights)

    def gram_v1(self, grid: QuadratureGrid) -> np.ndarray:
        grad = self.tabulate(grid).grad
        return np.einsum("kxzid,jxzid,xz->kj", grad, grad, grid.weights)

    def describe(self) -> Dict[str, int]:
        return {
            "n_pairs": self.n_pairs,
            "n_lifted": int(self.lifted_positions.size),
            "n_interior": int(self.interior_positions.size),
            "max_wavenumber": self.max_wavenumber,
            "profiles": self.layout.profiles,
        }


def build_basis_set(
    length: float,
    n_pairs: int,
    max_wavenumber: Optional[int] = None,
    profiles: Optional[int] = None,
    cache: Optional[BasisCache] = None,
) -> BasisSet:
    """Assemble the coupled enumeration for N pairs."""
    layout = default_layout(length, n_pairs, max_wavenumber, profiles)
    beam = BeamBasis.build(length, layout.n_lifted)

    transforms: Dict[Tuple[int, str], np.ndarray] = {}
    lifts: Dict[int, np.ndarray] = {}
    if cache is not None:
        transforms.update(cache.load(layout))
        lifts.update(cache.load_lifts(layout))

    lifted = [build_lifted_mode(mode, lifts.get(mode.index)) for mode in beam.modes]
    pool = build_interior_basis(length, layout.max_wavenumber, layout.profiles, transforms)
    interior = sorted(pool, key=interior_order_key)[: layout.n_interior]

    if cache is not None:
        cache.store(layout, transforms)
        cache.store_lifts(layout, {mode.beam_index: mode.profile.coefficients for mode in lifted})

    modes: List[FluidMode] = []
    for p in range(n_pairs):
        modes.append(lifted[p // 2] if p % 2 == 0 else interior[p // 2])

    logger.info(
        "Basis ready: %d pairs (%d lifted, %d interior), M=%d, N_z=%d",
        n_pairs,
        layout.n_lifted,
        layout.n_interior,
        layout.max_wavenumber,
        layout.profiles,
    )
    return BasisSet(layout, beam, modes)
