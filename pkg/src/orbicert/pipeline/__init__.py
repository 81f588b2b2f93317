"""Rigorous front end: interval arithmetic, field parsing, meshes, checks."""

from .interval import Interval
from .vfield import ParseError, VectorFieldExpr, parse_expression, parse_vector_field
from .mesh import MeshError, TriMesh
from .transversal import (
    TransversalityReport,
    UndeterminedCellsError,
    build_mvf,
    check_edge,
    check_triangle,
    detect_circular_intersection,
    perturb_mesh,
    validate_mesh,
    vertex_ift,
)

__all__ = [
    "Interval",
    "ParseError",
    "VectorFieldExpr",
    "parse_expression",
    "parse_vector_field",
    "MeshError",
    "TriMesh",
    "TransversalityReport",
    "UndeterminedCellsError",
    "build_mvf",
    "check_edge",
    "check_triangle",
    "detect_circular_intersection",
    "perturb_mesh",
    "validate_mesh",
    "vertex_ift",
]
