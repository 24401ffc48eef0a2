"""Beam modes, solenoidal fluid modes and initial-data projections."""

from .basis_set import BasisLayout, BasisSet, ModeTable, build_basis_set, default_layout
from .beam import BeamBasis, BeamMode, build_beam_basis, project_initial_beam, sample_height
from .cache import BasisCache
from .fluid import (
    ExponentialProfile,
    FluidMode,
    PolynomialProfile,
    build_interior_basis,
    build_lifted_mode,
)
from .projection import check_initial_compatibility, project_initial_fluid

__all__ = [
    "BeamMode",
    "BeamBasis",
    "build_beam_basis",
    "project_initial_beam",
    "sample_height",
    "FluidMode",
    "PolynomialProfile",
    "ExponentialProfile",
    "build_lifted_mode",
    "build_interior_basis",
    "BasisLayout",
    "BasisSet",
    "ModeTable",
    "build_basis_set",
    "default_layout",
    "BasisCache",
    "check_initial_compatibility",
    "project_initial_fluid",
]
