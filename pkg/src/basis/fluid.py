"""Solenoidal fluid modes built from streamfunctions s(x, z) = f(z) E(x).

The velocity is Psi = (ds/dz, -ds/dx), so every mode is divergence free
by construction. Interior modes vanish on z = 0 and z = 1; lifted modes
vanish on z = 0 and carry a beam mode times e2 on z = 1.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from numpy.polynomial import Legendre, Polynomial

from src.core.errors import RankDeficiency, SingularLift

from .beam import BeamMode

logger = logging.getLogger(__name__)

UNIT = [0.0, 1.0]
GRAM_SCHMIDT_FLOOR = 1e-12


# ---------------------------------------------------------------------------
# Vertical profiles
# ---------------------------------------------------------------------------


class PolynomialProfile:
    """Polynomial f(z) on [0, 1] held as a Legendre series."""

    kind = "polynomial"

    def __init__(self, series: Legendre):
        self.series = series
        self._derivs: Dict[int, Legendre] = {0: series}

    @classmethod
    def from_coefficients(cls, coeffs: Sequence[float]) -> "PolynomialProfile":
        return cls(Legendre(np.asarray(coeffs, dtype=float), domain=UNIT))

    @property
    def coefficients(self) -> np.ndarray:
        return np.asarray(self.series.coef, dtype=float)

    @property
    def degree(self) -> int:
        return self.series.degree()

    def __call__(self, z: np.ndarray, order: int = 0) -> np.ndarray:
        if order not in self._derivs:
            self._derivs[order] = self.series.deriv(order)
        return self._derivs[order](np.asarray(z, dtype=float))


class ExponentialProfile:
    """f(z) = a1 e^{k(z-1)} + a2 z e^{k(z-1)} + a3 e^{-kz} + a4 z e^{-kz}.

    Same span as {cosh kz, sinh kz, z cosh kz, z sinh kz}, with every
    term bounded by 1 on [0, 1] for any k > 0.
    """

    kind = "exponential"

    def __init__(self, kappa: float, coeffs: Sequence[float]):
        self.kappa = float(kappa)
        self.coeffs = np.asarray(coeffs, dtype=float)

    @staticmethod
    def fundamental(kappa: float, z: np.ndarray, order: int = 0) -> np.ndarray:
        """The four fundamental solutions (or derivatives), shaped (4,) + z.shape."""
        z = np.asarray(z, dtype=float)
        rising = np.exp(kappa * (z - 1.0))
        falling = np.exp(-kappa * z)
        out = []
        for lam, base in ((kappa, rising), (-kappa, falling)):
            out.append(lam**order * base)
            # d^n (z e^{lam z}) = (lam^n z + n lam^{n-1}) e^{lam z}
            linear = lam**order * z
            if order:
                linear = linear + order * lam ** (order - 1)
            out.append(linear * base)
        return np.stack(out)

    def __call__(self, z: np.ndarray, order: int = 0) -> np.ndarray:
        return np.tensordot(self.coeffs, self.fundamental(self.kappa, z, order), axes=1)

    @property
    def coefficients(self) -> np.ndarray:
        return self.coeffs


# ---------------------------------------------------------------------------
# Modes
# ---------------------------------------------------------------------------


@dataclass
class FluidMode:
    """A solenoidal mode; ``parity`` names E(x) ('cos' or 'sin')."""

    kind: str
    wavenumber_index: int
    kappa: float
    parity: str
    profile: object
    profile_index: int = 0
    beam_index: Optional[int] = None
    meta: Dict[str, float] = field(default_factory=dict)

    @property
    def is_lifted(self) -> bool:
        return self.kind == "lifted"

    def x_factor(self, x: np.ndarray, order: int = 0) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.kappa == 0.0:
            return np.ones_like(x) if order == 0 else np.zeros_like(x)
        phase = order * math.pi / 2.0
        if self.parity == "cos":
            phase += math.pi / 2.0
        return self.kappa**order * np.sin(self.kappa * x + phase)

    def evaluate(self, x: np.ndarray, z: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Psi shaped (n_x, n_z, 2) and grad Psi shaped (n_x, n_z, 2, 2).

        grad[..., i, d] is the derivative of component i along axis d
        (d = 0 for x, d = 1 for z).
        """
        E0, E1, E2 = (self.x_factor(x, k)[:, None] for k in range(3))
        f0, f1, f2 = (np.asarray(self.profile(z, k))[None, :] for k in range(3))
        shape = (np.size(x), np.size(z))
        psi = np.empty(shape + (2,))
        psi[..., 0] = f1 * E0
        psi[..., 1] = -f0 * E1
        grad = np.empty(shape + (2, 2))
        grad[..., 0, 0] = f1 * E1
        grad[..., 0, 1] = f2 * E0
        grad[..., 1, 0] = -f0 * E2
        grad[..., 1, 1] = -f1 * E1
        return psi, grad

    def laplacian(self, x: np.ndarray, z: np.ndarray) -> np.ndarray:
        E0, E1, E2, E3 = (self.x_factor(x, k)[:, None] for k in range(4))
        f0, f1, f2, f3 = (np.asarray(self.profile(z, k))[None, :] for k in range(4))
        out = np.empty((np.size(x), np.size(z), 2))
        out[..., 0] = f1 * E2 + f3 * E0
        out[..., 1] = -f0 * E3 - f2 * E1
        return out


# ---------------------------------------------------------------------------
# Lifted modes
# ---------------------------------------------------------------------------


def solve_lift_profile(kappa: float, top_value: float) -> np.ndarray:
    """Coefficients of the clamped biharmonic profile with f(1) = top_value."""
    rows = [
        ExponentialProfile.fundamental(kappa, np.array(0.0), 0),
        ExponentialProfile.fundamental(kappa, np.array(0.0), 1),
        ExponentialProfile.fundamental(kappa, np.array(1.0), 1),
        ExponentialProfile.fundamental(kappa, np.array(1.0), 0),
    ]
    system = np.stack(rows)
    rhs = np.array([0.0, 0.0, 0.0, top_value])
    condition = np.linalg.cond(system)
    if not np.isfinite(condition) or condition > 1.0 / np.finfo(float).eps:
        raise SingularLift(f"lift boundary system singular for kappa={kappa} (cond={condition:.2e})")
    try:
        return np.linalg.solve(system, rhs)
    except np.linalg.LinAlgError as exc:
        raise SingularLift(f"lift boundary system singular for kappa={kappa}") from exc


def build_lifted_mode(beam_mode: BeamMode, coeffs: Optional[np.ndarray] = None) -> FluidMode:
    """Stokes extension of psi_k e2 into the strip.

    ``coeffs`` skips the boundary solve with previously computed profile
    coefficients (from the basis cache).
    """
    kappa = beam_mode.kappa
    if kappa == 0.0:
        raise SingularLift("zero-wavenumber beam mode cannot be lifted")
    if beam_mode.parity == "sin":
        parity, top = "cos", beam_mode.amplitude / kappa
    else:
        parity, top = "sin", -beam_mode.amplitude / kappa
    if coeffs is None:
        coeffs = solve_lift_profile(kappa, top)
    return FluidMode(
        kind="lifted",
        wavenumber_index=beam_mode.wavenumber_index,
        kappa=kappa,
        parity=parity,
        profile=ExponentialProfile(kappa, coeffs),
        beam_index=beam_mode.index,
    )


# ---------------------------------------------------------------------------
# Interior modes
# ---------------------------------------------------------------------------


def _clamp_weight() -> Legendre:
    # z^2 (1 - z)^2
    return Polynomial([0.0, 0.0, 1.0, -2.0, 1.0]).convert(kind=Legendre, domain=UNIT)


def _shear_weight() -> Legendre:
    # z (1 - z)
    return Polynomial([0.0, 1.0, -1.0]).convert(kind=Legendre, domain=UNIT)


def interior_candidate(kappa: float, n: int) -> Legendre:
    """Raw streamfunction profile before orthonormalization."""
    legendre_n = Legendre.basis(n, domain=UNIT)
    if kappa == 0.0:
        return (_shear_weight() * legendre_n).integ(lbnd=0.0)
    return _clamp_weight() * legendre_n


def profile_gram(kappa: float, length: float, profiles: Sequence[Legendre]) -> np.ndarray:
    """V1 Gram matrix of modes f_a(z) E(x) sharing one x factor.

    The x integrals are done in closed form; the z integrals with a Gauss
    rule exact for the polynomial degrees involved.
    """
    degree = max(p.degree() for p in profiles)
    z, wz = np.polynomial.legendre.leggauss(degree + 2)
    z, wz = 0.5 * (z + 1.0), 0.5 * wz
    d0 = np.stack([p(z) for p in profiles])
    d1 = np.stack([p.deriv(1)(z) for p in profiles])
    d2 = np.stack([p.deriv(2)(z) for p in profiles])
    if kappa == 0.0:
        return length * (d2 * wz) @ d2.T
    return 0.5 * length * (
        2.0 * kappa**2 * (d1 * wz) @ d1.T + (d2 * wz) @ d2.T + kappa**4 * (d0 * wz) @ d0.T
    )


def gram_schmidt(gram: np.ndarray) -> np.ndarray:
    """Modified Gram-Schmidt in the inner product given by ``gram``.

    Returns T with row i holding the coefficients of the i-th orthonormal
    vector in terms of the candidates.
    """
    size = gram.shape[0]
    T = np.eye(size)
    for i in range(size):
        original = math.sqrt(max(gram[i, i], 0.0))
        for j in range(i):
            projection = T[j] @ gram @ T[i]
            T[i] = T[i] - projection * T[j]
        norm_sq = T[i] @ gram @ T[i]
        norm = math.sqrt(max(norm_sq, 0.0))
        if original == 0.0 or norm < GRAM_SCHMIDT_FLOOR * original:
            raise RankDeficiency(f"candidate {i} is numerically dependent (norm {norm:.2e})")
        T[i] = T[i] / norm
    return T


def interior_blocks(max_wavenumber: int) -> List[Tuple[int, str]]:
    blocks = [(0, "cos")]
    for m in range(1, max_wavenumber + 1):
        blocks.extend([(m, "cos"), (m, "sin")])
    return blocks


def build_interior_basis(
    length: float,
    max_wavenumber: int,
    profiles: int,
    transforms: Optional[Dict[Tuple[int, str], np.ndarray]] = None,
) -> List[FluidMode]:
    """V1-orthonormal interior modes for wavenumbers 0..M and N_z profiles.

    ``transforms`` may supply cached Gram-Schmidt matrices per block; the
    ones computed here are recorded back into it.
    """
    if max_wavenumber < 0 or profiles < 1:
        raise ValueError(f"interior basis needs M >= 0 and N_z >= 1 (got {max_wavenumber}, {profiles})")

    modes: List[FluidMode] = []
    for m, parity in interior_blocks(max_wavenumber):
        kappa = 2.0 * math.pi * m / length
        candidates = [interior_candidate(kappa, n) for n in range(profiles)]
        key = (m, parity)
        T = transforms.get(key) if transforms is not None else None
        if T is None:
            T = gram_schmidt(profile_gram(kappa, length, candidates))
            if transforms is not None:
                transforms[key] = T
        for n in range(profiles):
            combined = Legendre([0.0], domain=UNIT)
            for j in range(n + 1):
                combined = combined + float(T[n, j]) * candidates[j]
            modes.append(
                FluidMode(
                    kind="interior",
                    wavenumber_index=m,
                    kappa=kappa,
                    parity=parity,
                    profile=PolynomialProfile(combined),
                    profile_index=n,
                )
            )
    logger.debug("Built %d interior modes (M=%d, N_z=%d)", len(modes), max_wavenumber, profiles)
    return modes


def interior_order_key(mode: FluidMode) -> Tuple[int, int, int, int]:
    return (
        mode.wavenumber_index + mode.profile_index,
        mode.wavenumber_index,
        mode.profile_index,
        0 if mode.parity == "cos" else 1,
    )
