"""Exact precells mod N in (Z u {+inf})^m, their faces, monohedral divisions and the
p-adic transfer to polytopes mod N."""
from .core import INF, AffineMap, delta, format_point, make_point, project
from .errors import GammacellError
from .precell import Precell, contains, faces, facets, is_closed, is_monohedral, tower, validate
from .division import (
    monohedral_decomposition, monohedral_division, relative_split, split_monohedral,
)
from .bounding import PiecewiseAffineMap, dominate_affine, hat_map, minorize_affine
from .padic import PAdicContext, PAdicPolytope, monotopic_division, polytope_contains

__version__ = "0.1.0"

__all__ = [
    "INF", "AffineMap", "GammacellError", "PAdicContext", "PAdicPolytope", "PiecewiseAffineMap",
    "Precell", "contains", "delta", "dominate_affine", "faces", "facets", "format_point",
    "hat_map", "is_closed", "is_monohedral", "make_point", "minorize_affine",
    "monohedral_decomposition", "monohedral_division", "monotopic_division",
    "polytope_contains", "project", "relative_split", "split_monohedral", "tower", "validate",
]
