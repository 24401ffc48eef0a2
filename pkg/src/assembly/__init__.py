"""Quadrature and Galerkin assembly of the coupled system."""

from .initial import InitialAcceleration, initial_acceleration
from .mapped import MappedModes, map_modes
from .operators import (
    AssemblyOptions,
    GalerkinOperators,
    assemble_first_order,
    assemble_on_geometry,
    convection_matrix,
    state_geometry,
)
from .quadrature import QuadratureGrid, build_quadrature
from .tensors import DifferentiatedTensors, assemble_differentiated_tensors, first_order_acceleration

__all__ = [
    "QuadratureGrid",
    "build_quadrature",
    "MappedModes",
    "map_modes",
    "AssemblyOptions",
    "GalerkinOperators",
    "assemble_first_order",
    "assemble_on_geometry",
    "convection_matrix",
    "state_geometry",
    "DifferentiatedTensors",
    "assemble_differentiated_tensors",
    "first_order_acceleration",
    "InitialAcceleration",
    "initial_acceleration",
]
