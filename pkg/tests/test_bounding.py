import pytest

from gammacell.core import INF, AffineMap
from gammacell.errors import InfinitePiece, NotDivergent
from gammacell.bounding import (
    PiecewiseAffineMap, dominate_affine, hat_map, lower_selector, minorize_affine,
)
from gammacell.precell import contains, proper_faces, to_basic, tower
from gammacell.presburger.sets import DivergesToInfinity, limit_behavior, minimum

from helpers import aff, band, bset, nn, sup, wedge
import suites

N1 = bset(1, (1,), "x1 >= 0")
N2 = bset(2, (1, 2), "x1 >= 0", "x2 >= 0")


def test_dominate_examples():
    fs = [aff("3*x1 - 2", (1, 2), 2), aff("x1 + x2 + 7", (1, 2), 2)]
    d = dominate_affine(N2, fs)
    assert d.const == 8 and d.coeff_dict() == {0: 4, 1: 4}
    d = dominate_affine(N1, [AffineMap.constant(sup(1), 0)])
    assert d.const == 1 and d.coeff_dict() == {0: 1}
    d = dominate_affine(N2, [aff("x2 - x1", (1, 2), 2)])
    assert d.const == 1 and d.coeff_dict() == {0: 2, 1: 2}
    for a in range(12):
        for b in range(12):
            assert d((a, b)) >= b - a


def test_dominate_piecewise_and_infinite():
    pw = PiecewiseAffineMap.single(N2, aff("5*x2 + 1", (1, 2), 2))
    d = dominate_affine(N2, [pw])
    assert d.coeff_dict() == {0: 6, 1: 6} and d.const == 2
    with pytest.raises(InfinitePiece):
        dominate_affine(N2, [AffineMap.infinity(sup(1, 2))])


def _sandwich(A, f, B=10):
    h = hat_map(A, f)
    X = to_basic(A)
    low = minimum(f, X) - abs(f.coeff(A.m - 1)) * A.modulus
    for a in range(B):
        for b in range(4 * B):
            if contains(A, (a, b)):
                assert low <= h((a,)) <= f((a, b))
    return h


def test_hat_map_examples():
    h = _sandwich(wedge(), aff("x2", (1, 2), 2))
    assert h.coeff_dict() == {0: 1} and h.const == 0
    h = _sandwich(wedge(), aff("x1 + x2", (1, 2), 2))
    assert h.coeff_dict() == {0: 2}
    # negative last slope: the upper boundary is used
    wide = tower([(0,), (aff("x1", (1,), 2), aff("3*x1", (1,), 2))])
    h = _sandwich(wide, aff("4*x1 - x2", (1, 2), 2))
    assert h.coeff_dict() == {0: 1}


def test_hat_map_needs_divergence():
    with pytest.raises(NotDivergent):
        hat_map(nn(), aff("x2", (1, 2), 2))


def test_lower_selector():
    A = tower([(0,), (aff("1/2*x1", (1,), 2), INF, 2)], N=[1, 3])
    assert lower_selector(A, (3,)) == 2
    assert lower_selector(A, (6,)) == 5


def _minorant_ok(A, fs, g, B=12):
    X = to_basic(A)
    for a in suites._box_points(A, B):
        assert g(a) <= min(f(a) for f in fs)
    for F in proper_faces(A):
        assert isinstance(limit_behavior(X, F.support, g), DivergesToInfinity)


def test_minorize_examples():
    A = tower([(0,)])
    fs = [aff("2*x1 + 3", (1,), 1), aff("x1 + 10", (1,), 1)]
    g = minorize_affine(A, fs)
    _minorant_ok(A, fs, g, 50)
    assert g((0,)) > 0 and g((0,)) <= 3
    f1 = [aff("3*x1 + 1", (1,), 1)]
    _minorant_ok(A, f1, minorize_affine(A, f1))
    fs = [aff("x2 + 1", (1, 2), 2), aff("x1 + x2 + 1", (1, 2), 2)]
    g = minorize_affine(wedge(), fs)
    _minorant_ok(wedge(), fs, g)
    assert minimum(g, to_basic(wedge())) > 0


def test_minorize_on_a_band():
    fs = [aff("2*x2 - x1 + 2", (1, 2), 2), aff("2*x1 + 1", (1, 2), 2)]
    _minorant_ok(band(), fs, minorize_affine(band(), fs))


def test_minorize_rejects_bounded_map():
    with pytest.raises(NotDivergent):
        minorize_affine(nn(), [aff("x1", (1, 2), 2)])
    # x2 - x1 stays at 0 along the diagonal of the band
    with pytest.raises(NotDivergent):
        minorize_affine(band(), [aff("x2 - x1 + 2", (1, 2), 2)])


def test_bounding_corpus_slice():
    tally = suites.bounding_suite(count=40, seed=4)
    assert tally.ok, tally.failures
