"""Presburger sets over Gamma^m: formulas, quantifier elimination, faces and limits."""
from .engine import Conj, find_model, is_sat
from .formula import (
    FALSE, TRUE, And, Atom, Exists, Forall, Formula, LinExpr, Not, Or, cong, conjunction,
    disjunction, evaluate, exists, forall, is_satisfiable, qe, to_text, var,
)
from .sets import (
    BasicPresburgerSet, DivergesToInfinity, FaceTree, FiniteFactorization, NotLargelyContinuous,
    PresburgerSet, affine_points, build_face_tree, contains, face, face_as_formula,
    face_nonempty, face_supports, face_tree, find_point, intersects, is_empty, limit_behavior,
    minimum, recession_witness, set_equal, set_subset, skolem_threshold, union,
)

__all__ = [
    "FALSE", "TRUE", "And", "Atom", "BasicPresburgerSet", "Conj", "DivergesToInfinity", "Exists",
    "FaceTree", "FiniteFactorization", "Forall", "Formula", "LinExpr", "Not", "NotLargelyContinuous",
    "Or", "PresburgerSet", "affine_points", "build_face_tree", "cong", "conjunction", "contains",
    "disjunction", "evaluate", "exists", "face", "face_as_formula", "face_nonempty",
    "face_supports", "face_tree", "find_model", "find_point", "forall", "intersects", "is_empty",
    "is_sat", "is_satisfiable", "limit_behavior", "minimum", "qe", "recession_witness",
    "set_equal", "set_subset", "skolem_threshold", "to_text", "union", "var",
]
