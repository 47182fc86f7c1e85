"""Small builders shared by the tests.  Supports and variables are 1-based here."""
import itertools

from gammacell.core import INF
from gammacell.precell import Precell, tower
from gammacell.presburger.sets import BasicPresburgerSet
from gammacell.scene import parse_affine, parse_constraint


def bset(m, support, *constraints):
    atoms = [a for text in constraints for a in parse_constraint(text, m)]
    return BasicPresburgerSet.from_atoms(m, frozenset(i - 1 for i in support), atoms)


def aff(text, support, m=3):
    """Affine map from text on the 1-based ``support``."""
    return parse_affine(text, frozenset(i - 1 for i in support), m)


def sup(*idx):
    return frozenset(i - 1 for i in idx)


def even_lift():
    """Four faces; the one of support {3} keeps only even values."""
    return bset(3, (1, 2, 3), "x1 >= 0", "x2 >= x1", "x3 = 2*x2 - 2*x1")


def thin_slab():
    """x3 squeezed into a window of width 1/3; its facet formulas need two residues."""
    return bset(3, (1, 2, 3), "0 <= x1 <= x2", "x1 + 3*x2 <= 3*x3 <= x1 + 3*x2 + 1")


def nn(m=2):
    """N^m as a precell."""
    return tower([(0,)] * m)


def wedge():
    """{a1 >= 0, a2 >= a1}"""
    return tower([(0,), (aff("x1", (1,), 2),)])


def band():
    """{a1 >= 0, a1 <= a2 <= 2 a1}"""
    return tower([(0,), (aff("x1", (1,), 2), aff("2*x1", (1,), 2))])


def grid(m, B, inf=True):
    vals = list(range(B + 1)) + ([INF] if inf else [])
    return itertools.product(vals, repeat=m)


__all__ = ["INF", "Precell", "aff", "band", "bset", "even_lift", "thin_slab", "grid", "nn",
           "sup", "tower", "wedge"]
