"""Finite cube complexes: validation, links, hyperplanes, convexity and collapse."""

from .cells import (
    ComplexError,
    Cube,
    CubeComplex,
    DanglingReference,
    DuplicateId,
    Inconsistent3CubePairing,
    MalformedInput,
    NonClosingSquareBoundary,
    NotConnected,
    Subcomplex,
    UnknownVertex,
    describe,
    validate,
)
from .collapse import CollapseCertificate, NotNPC, Stuck, collapse_to_point, free_faces, replay
from .convexity import convex_hull, is_convex
from .hyperplanes import Carrier, Hyperplane, carrier, hyperplanes, midcube_complex, separation
from .links import VertexLink, brute_force_flag, check_npc, link

__all__ = [
    "Carrier", "CollapseCertificate", "ComplexError", "Cube", "CubeComplex", "DanglingReference",
    "DuplicateId", "Hyperplane", "Inconsistent3CubePairing", "MalformedInput", "NonClosingSquareBoundary",
    "NotConnected", "NotNPC", "Stuck", "Subcomplex", "UnknownVertex", "VertexLink", "brute_force_flag",
    "carrier", "check_npc", "collapse_to_point", "convex_hull", "describe", "free_faces", "hyperplanes",
    "is_convex", "link", "midcube_complex", "replay", "separation", "validate",
]
