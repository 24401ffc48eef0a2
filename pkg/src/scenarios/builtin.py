"""Closed-form and sampled initial data."""

from __future__ import annotations

import logging
import math

import numpy as np
from scipy.interpolate import CubicSpline

from src.basis.beam import build_beam_basis
from src.core.errors import SchemaError

from .base import InitialData, Scenario, ScenarioContext

logger = logging.getLogger(__name__)


def _cosine(length: float, wavenumber: int):
    kappa = 2.0 * math.pi * wavenumber / length
    return lambda x: np.cos(kappa * np.asarray(x, dtype=float))


class FlatScenario(Scenario):
    """Rest state: h0 = mean, h1 = 0, no flow."""

    name = "flat"

    def build(self, context: ScenarioContext) -> InitialData:
        mean = float(context.param("mean", 1.0))
        return InitialData(h0=mean, h1=0.0, description=f"flat beam at height {mean:g}")


class SinePerturbationScenario(Scenario):
    """h0 = 1 + a cos(2 pi m x / L), beam and fluid at rest."""

    name = "sine_perturbation"

    def build(self, context: ScenarioContext) -> InitialData:
        amplitude = float(context.param("amplitude", 0.1))
        wavenumber = int(context.param("wavenumber", 1))
        wave = _cosine(context.length, wavenumber)
        return InitialData(
            h0=lambda x: 1.0 + amplitude * wave(x),
            h1=0.0,
            description=f"cosine perturbation a={amplitude:g}, m={wavenumber}",
        )


class DescendingScenario(Scenario):
    """h0 = 1 - a cos(2 pi m x / L) pushed down at its minimum with speed b.

    h1 = -b cos(2 pi m x / L); the fluid starts in the Stokes lift of h1.
    """

    name = "descending"

    def build(self, context: ScenarioContext) -> InitialData:
        depth = float(context.param("depth", 0.5))
        speed = float(context.param("speed", 1.0))
        wavenumber = int(context.param("wavenumber", 1))
        if not 0.0 <= depth < 1.0:
            raise SchemaError("initial.params.depth: must lie in [0, 1)", "initial.params.depth")
        wave = _cosine(context.length, wavenumber)
        return InitialData(
            h0=lambda x: 1.0 - depth * wave(x),
            h1=lambda x: -speed * wave(x),
            description=f"descending beam depth={depth:g}, speed={speed:g}",
        )


class LiftedModeScenario(Scenario):
    """Flat beam moving in a single beam mode: h1 = amplitude * psi_k."""

    name = "lifted_mode"

    def build(self, context: ScenarioContext) -> InitialData:
        index = int(context.param("mode", 1))
        amplitude = float(context.param("amplitude", 0.1))
        if index < 1:
            raise SchemaError("initial.params.mode: must be >= 1", "initial.params.mode")
        mode = build_beam_basis(context.length, index)[-1]
        return InitialData(
            h0=1.0,
            h1=lambda x: amplitude * mode.evaluate(x),
            description=f"lifted beam mode {index} with amplitude {amplitude:g}",
        )


class SampledScenario(Scenario):
    """h0 and h1 sampled on a uniform periodic grid, read from CSV or npz.

    CSV files carry a header with the columns ``x,h0,h1``; npz archives the
    arrays ``h0`` and ``h1``. Samples are interpolated by periodic cubic
    splines. The fluid starts in the Stokes lift of h1.
    """

    name = "sampled"

    def build(self, context: ScenarioContext) -> InitialData:
        if context.file is None:
            raise SchemaError("initial.file: required by the 'sampled' scenario", "initial.file")
        h0, h1 = self._read(context)
        if h0.size != h1.size or h0.size < 4:
            raise SchemaError("initial.file: h0 and h1 need the same length >= 4", "initial.file")
        nodes = np.arange(h0.size + 1) * (context.length / h0.size)
        spline0 = CubicSpline(nodes, np.append(h0, h0[0]), bc_type="periodic")
        spline1 = CubicSpline(nodes, np.append(h1, h1[0]), bc_type="periodic")
        period = context.length
        logger.info("Loaded %d height samples from %s", h0.size, context.file)
        return InitialData(
            h0=lambda x: spline0(np.mod(x, period)),
            h1=lambda x: spline1(np.mod(x, period)),
            description=f"sampled data from {context.file.name}",
        )

    @staticmethod
    def _read(context: ScenarioContext):
        path = context.file
        if not path.exists():
            raise SchemaError(f"initial.file: {path} not found", "initial.file")
        if path.suffix.lower() == ".npz":
            with np.load(path) as archive:
                return np.asarray(archive["h0"], dtype=float), np.asarray(archive["h1"], dtype=float)
        table = np.genfromtxt(path, delimiter=",", names=True)
        missing = {"h0", "h1"} - set(table.dtype.names or ())
        if missing:
            raise SchemaError(f"initial.file: missing columns {sorted(missing)}", "initial.file")
        return np.atleast_1d(table["h0"]).astype(float), np.atleast_1d(table["h1"]).astype(float)
