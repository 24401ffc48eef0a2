"""Exit codes and step annotation of the error hierarchy."""

import pytest

from src.core.errors import (
    CompatibilityViolation,
    ContactReached,
    NonPositiveHeight,
    PicardDivergence,
    SchemaError,
    SimulationError,
    VersionMismatch,
    exit_code_for,
)

pytestmark = pytest.mark.unit


@pytest.mark.parametrize(
    "error, code",
    [
        (ContactReached("floor"), 2),
        (PicardDivergence("stalled"), 3),
        (SchemaError("bad key", "physics.mu"), 4),
        (VersionMismatch("old"), 4),
        (NonPositiveHeight("h <= 0"), 1),
        (CompatibilityViolation("mean"), 1),
        (ValueError("foreign"), 1),
    ],
)
def test_exit_codes(error, code):
    assert exit_code_for(error) == code


def test_details_are_kept():
    error = PicardDivergence("stalled", residual=1e-3, dt=0.1)
    assert error.details == {"residual": 1e-3, "dt": 0.1}


def test_annotate_records_step():
    error = ContactReached("floor", time=0.2)
    assert error.annotate(41, "state") is error
    assert (error.step_index, error.last_state) == (41, "state")


def test_all_errors_share_the_base():
    assert issubclass(SchemaError, SimulationError)
    assert CompatibilityViolation("x", {"mean_h1": 1.0}).violations == {"mean_h1": 1.0}
