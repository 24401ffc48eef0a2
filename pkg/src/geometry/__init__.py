"""Domain transformation, derived fields and geometric monitors."""

from .field import GeometryField
from .mapping import l2_norm_ratio, pullback, pushforward
from .monitors import CONTACT_ALLOWANCE, bound_holds, contact_bound, hoelder_check
from .transform import (
    DEFAULT_H_FLOOR,
    CorrectionField,
    GeometrySample,
    PressureTestField,
    TransformMatrices,
    check_height,
    correction_field,
    matvec,
    pressure_test_field,
    transform_matrices,
)

__all__ = [
    "DEFAULT_H_FLOOR",
    "GeometrySample",
    "TransformMatrices",
    "CorrectionField",
    "PressureTestField",
    "GeometryField",
    "transform_matrices",
    "correction_field",
    "pressure_test_field",
    "check_height",
    "matvec",
    "pullback",
    "pushforward",
    "l2_norm_ratio",
    "CONTACT_ALLOWANCE",
    "contact_bound",
    "bound_holds",
    "hoelder_check",
]
