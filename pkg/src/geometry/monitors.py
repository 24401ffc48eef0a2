"""Contact-time bound and Hoelder-modulus monitor of the beam height."""

from __future__ import annotations

import logging
import math
from typing import Optional, Sequence

import numpy as np

from src.core.errors import NonPositiveInput

logger = logging.getLogger(__name__)

# Relative slack granted to an observed contact time for time discretisation.
CONTACT_ALLOWANCE = 0.05


def contact_bound(delta: float, C0: float) -> float:
    """No contact can happen before (delta / sqrt(C0))**1.5."""
    if delta <= 0.0 or C0 <= 0.0:
        raise NonPositiveInput(f"contact bound needs delta > 0 and C0 > 0 (got {delta}, {C0})")
    return (delta / math.sqrt(C0)) ** 1.5


def bound_holds(contact_time: Optional[float], bound: float, allowance: float = CONTACT_ALLOWANCE) -> bool:
    if contact_time is None:
        return True
    return contact_time >= bound * (1.0 - allowance)


def hoelder_check(
    times: Sequence[float],
    x: np.ndarray,
    heights: np.ndarray,
    C0: float,
    r: float,
    length: float,
) -> float:
    """Worst ratio |h(t1,x) - h(t2,y)| / (3 sqrt(C0) r) over admissible pairs.

    ``heights`` is (n_t, n_x) sampled at ``times`` and the periodic nodes
    ``x``. Admissible pairs satisfy 0 < t2 - t1 <= r**1.5 and periodic
    |x - y| < r / 2. A value at most 1 certifies the modulus numerically.
    """
    if C0 <= 0.0 or r <= 0.0:
        raise NonPositiveInput(f"hoelder check needs C0 > 0 and r > 0 (got {C0}, {r})")
    times = np.asarray(times, dtype=float)
    x = np.asarray(x, dtype=float)
    heights = np.asarray(heights, dtype=float)
    if times.size < 2:
        return 0.0

    gap = np.abs(x[:, None] - x[None, :])
    gap = np.minimum(gap, length - gap)
    close = gap < r / 2.0
    window = r**1.5
    scale = 3.0 * math.sqrt(C0) * r

    worst = 0.0
    for a in range(times.size):
        for b in range(a + 1, times.size):
            span = times[b] - times[a]
            if span > window:
                break
            if span <= 0.0:
                continue
            diff = np.abs(heights[a][:, None] - heights[b][None, :])
            worst = max(worst, float(np.max(np.where(close, diff, 0.0))))
    return worst / scale
