"""Disc and spherical diagrams: validation, reduction and boundary features."""

from .features import (
    CONDITIONS,
    BoundaryFeatures,
    DichotomyVerdict,
    DualCurve,
    Pathology,
    Shell,
    boundary_features,
    check_dichotomy,
    curve_pathologies,
    dual_curves,
    is_reduced,
    is_single_cell,
    pathologies,
)
from .model import (
    OUTER,
    ConeBoundaryNotClosed,
    ConeCell,
    ConeCellNotFound,
    Complexity,
    Diagram,
    DiagramError,
    EulerMismatch,
    FillingRequired,
    LabelMismatch,
    MalformedDiagram,
    NonPlanar,
    PreconditionNotCertified,
    check_diagram,
    lift_cone,
    validate_diagram,
)
from .moves import (
    ReduceResult,
    TraceEntry,
    absorb_square,
    boundary_signature,
    cancel_squares,
    cap,
    combine_cones,
    fill_cone,
    fold_cone,
    hexagon_move,
    puncture,
    rebuild,
    reduce_diagram,
)

__all__ = [
    "CONDITIONS", "OUTER", "BoundaryFeatures", "Complexity", "ConeBoundaryNotClosed", "ConeCell",
    "ConeCellNotFound", "DichotomyVerdict", "Diagram", "DiagramError", "DualCurve", "EulerMismatch",
    "FillingRequired", "LabelMismatch", "MalformedDiagram", "NonPlanar", "Pathology",
    "PreconditionNotCertified", "ReduceResult", "Shell", "TraceEntry", "absorb_square", "boundary_features",
    "boundary_signature", "cancel_squares", "cap", "check_diagram", "check_dichotomy", "combine_cones",
    "curve_pathologies", "dual_curves", "fill_cone", "fold_cone", "hexagon_move", "is_reduced",
    "is_single_cell", "lift_cone", "pathologies", "puncture", "rebuild", "reduce_diagram", "validate_diagram",
]
