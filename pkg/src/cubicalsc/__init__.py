"""Cubical small cancellation: cube complexes, cubical presentations, diagrams and Artin groups."""

from .complex_core import CubeComplex, Subcomplex, check_npc, collapse_to_point, describe, validate
from .morphisms import CombinatorialMap, validate_map
from .presentation import CubicalPresentation, check_cn, rose_presentation

__version__ = "0.1.0"

__all__ = [
    "CombinatorialMap", "CubeComplex", "CubicalPresentation", "Subcomplex", "check_cn", "check_npc",
    "collapse_to_point", "describe", "rose_presentation", "validate", "validate_map",
]
