"""Differentiated residual: convergence under dt refinement and sensitivity to wrong dynamics."""

import math
from dataclasses import replace

import numpy as np
import pytest

from src.integrator import differentiated_residual, prepare, run
from src.pipeline.config import SimConfig
from src.verification.suites import MUTATIONS

pytestmark = pytest.mark.integration

DTS = (4e-3, 2e-3, 1e-3)
COMPARE_AT = 0.02


def bump_config(dt: float) -> SimConfig:
    return SimConfig.from_dict(
        {
            "discretization": {"n_pairs": 6},
            "time": {"dt": dt, "t_end": 0.04},
            "initial": {"scenario": "sine_perturbation", "params": {"amplitude": 0.1}},
        }
    )


@pytest.fixture(scope="module")
def runs():
    results = {}
    for dt in DTS:
        config = bump_config(dt)
        results[dt] = run(config, progress=False)
    return results


def _residual(result, trajectory=None):
    sim = result.simulation
    if trajectory is None:
        trajectory = result.trajectory
    return differentiated_residual(
        trajectory, sim.basis, sim.grid, sim.config.physics, h_floor=sim.config.time.h_floor
    )


def _at(series, t: float) -> float:
    index = int(np.argmin(np.abs(series.times - t)))
    assert series.times[index] == pytest.approx(t, abs=1e-12)
    return float(series.norms[index])


def test_residual_decreases_under_dt_refinement(runs):
    values = [_at(_residual(runs[dt]), COMPARE_AT) for dt in DTS]
    assert values[0] > values[1] > values[2] > 0.0
    orders = [math.log2(coarse / fine) for coarse, fine in zip(values[:-1], values[1:])]
    assert min(orders) >= 1.0


def test_perturbed_state_raises_the_residual(runs):
    result = runs[DTS[-1]]
    baseline = _residual(result)

    states = list(result.trajectory.states)
    middle = len(states) // 2
    states[middle] = states[middle].replace(alpha=states[middle].alpha + 1e-3)
    perturbed = _residual(result, replace(result.trajectory, states=states))

    assert perturbed.max >= 10.0 * baseline.max


def test_flipped_convection_is_detected(runs):
    production = _residual(runs[DTS[-1]])
    config = bump_config(DTS[-1])
    options = MUTATIONS["sign-flip"]
    mutated = run(config, simulation=prepare(config, options), options=options, progress=False)

    assert mutated.status == "completed"
    assert _residual(mutated).max >= 10.0 * production.max
