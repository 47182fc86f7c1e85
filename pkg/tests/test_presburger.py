from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from gammacell.core import INF, AffineMap
from gammacell.errors import EmptyFace, NoThreshold, Unbounded
from gammacell.oracle import generate_basic_sets, random_basic_set
from gammacell.presburger.formula import cong, conjunction, var
from gammacell.presburger.formula import set_equal as formula_equal
from gammacell.presburger.sets import (
    DivergesToInfinity, FiniteFactorization, NotLargelyContinuous, contains, face,
    face_as_formula, face_nonempty, face_supports, face_tree, is_empty, limit_behavior, minimum,
    recession_witness, set_equal, skolem_threshold,
)

from helpers import aff, bset, even_lift, thin_slab, grid, sup

N2 = bset(2, (1, 2), "x1 >= 0", "x2 >= 0")
WEDGE = bset(2, (1, 2), "x1 >= 0", "x2 >= x1")


def test_contains_example():
    A = even_lift()
    assert contains(A, (1, 3, 4))
    assert not contains(A, (1, 3, 5))
    assert not contains(A, (1, 3, INF))


def test_is_empty_examples():
    assert is_empty(bset(1, (1,), "x1 >= 1", "0 >= x1"))
    assert not is_empty(bset(1, (1,), "x1 >= 0", "x1 ≡ 1 [2]"))
    assert is_empty(bset(1, (1,), "2*x1 ≡ 1 [2]"))


def test_minimum_examples():
    assert minimum(aff("x1 + x2", (1, 2), 2), N2) == 0
    assert minimum(aff("2*x1 - 5", (1,), 1), bset(1, (1,), "x1 >= 3", "x1 ≡ 0 [2]")) == 3
    assert minimum(aff("x2 - x1", (1, 2), 2), WEDGE) == 0


def test_minimum_matches_enumeration():
    A = bset(2, (1, 2), "x1 >= 2", "3*x2 >= x1 + 4", "x2 ≡ 1 [3]")
    f = aff("5/2*x2 - 1/2*x1 + 1/3", (1, 2), 2)
    brute = min(f((a, b)) for a in range(40) for b in range(40) if contains(A, (a, b)))
    # f >= x1/3 + 10/3 on A, so the optimum sits inside the box
    assert minimum(f, A) == brute
    with pytest.raises(Unbounded):
        minimum(aff("5/2*x2 - 2*x1", (1, 2), 2), A)


def _check_witness(A, J, u, delta):
    for j in J:
        assert u[j] == 0
    for i in A.support - J:
        assert u[i] >= delta
    for a in grid(A.m, 6, inf=False):
        a = tuple(INF if i not in A.support else v for i, v in enumerate(a))
        if contains(A, a):
            assert contains(A, tuple(INF if v is INF else v + w for v, w in zip(a, u)))


def test_recession_witness_examples():
    A = even_lift()
    u = recession_witness(A, sup(1), 3)
    _check_witness(A, sup(1), u, 3)
    assert u[2] == 2 * u[1]
    assert recession_witness(A, sup(2), 1) is None
    assert recession_witness(N2, frozenset(), 1) == (1, 1)


def test_face_nonempty_examples():
    assert set(face_supports(even_lift())) == {sup(1, 2, 3), sup(1), sup(3), frozenset()}
    assert len(face_supports(N2)) == 4
    diag = bset(2, (1, 2), "x1 = x2", "x1 >= 0")
    assert not face_nonempty(diag, sup(1))
    assert not face_nonempty(diag, sup(2))
    assert face_nonempty(diag, frozenset())


def test_face_formulas():
    x1, x3 = var(0), var(2)
    f1 = face_as_formula(thin_slab(), sup(1))
    assert formula_equal(f1, conjunction(x1.ge(0), cong(x1, 0, 3) | cong(x1, 2, 3)))
    f3 = face_as_formula(even_lift(), sup(3))
    assert formula_equal(f3, conjunction(x3.ge(0), cong(x3, 0, 2)))
    assert formula_equal(face_as_formula(N2, sup(1)), x1.ge(0))
    with pytest.raises(EmptyFace):
        face_as_formula(even_lift(), sup(2))


def test_face_tree_examples():
    t = face_tree(even_lift())
    assert set(t.nodes) == {sup(1, 2, 3), sup(1), sup(3), frozenset()}
    assert t.root == frozenset() and not t.is_chain
    assert (sup(1), frozenset()) in t.edges and (sup(3), frozenset()) in t.edges
    assert not face_tree(N2).is_chain
    w = face_tree(WEDGE)
    assert w.is_chain and list(w.nodes) == [frozenset(), sup(1), sup(1, 2)]


def test_limit_behavior_examples():
    r = limit_behavior(even_lift(), sup(3), aff("x2 - x1", (1, 2, 3)))
    assert isinstance(r, FiniteFactorization)
    assert r.f_star.coeff_dict() == {2: Fraction(1, 2)} and r.f_star.const == 0
    assert isinstance(limit_behavior(N2, sup(1), aff("x2", (1, 2), 2)), DivergesToInfinity)
    r = limit_behavior(WEDGE, frozenset(), aff("2*x2 - 2*x1", (1, 2), 2))
    assert isinstance(r, NotLargelyContinuous)


def _threshold_ok(A, J, f, g, eta, B=14):
    for a in grid(A.m, B, inf=False):
        if contains(A, a):
            b = tuple(v if i in J else INF for i, v in enumerate(a))
            d = min(a[i] for i in A.support - J)
            if d >= eta(b):
                assert f(a) >= g(b), (a, eta)


def test_skolem_threshold_examples():
    eta = skolem_threshold(N2, sup(1), aff("x2", (1, 2), 2), aff("x1", (1,), 2))
    assert eta.integral
    _threshold_ok(N2, sup(1), aff("x2", (1, 2), 2), aff("x1", (1,), 2), eta)
    f = aff("2*x2 - 5", (1, 2), 2)
    eta = skolem_threshold(N2, sup(1), f, AffineMap.constant(sup(1), 0))
    assert eta.coeff_dict() == {} and eta.const == 3
    f = aff("x2 - x1", (1, 2), 2)
    eta = skolem_threshold(WEDGE, sup(1), f, aff("x1", (1,), 2))
    _threshold_ok(WEDGE, sup(1), f, aff("x1", (1,), 2), eta)
    with pytest.raises(NoThreshold):
        skolem_threshold(N2, sup(1), aff("x1", (1, 2), 2), AffineMap.constant(sup(1), 0))


# properties over generated basic sets ------------------------------------------


def _projection_on_grid(A, J, B):
    """Points of support J reachable as limits, by brute force plus the recession certificate."""
    if recession_witness(A, J, 1) is None:
        return set()
    out = set()
    for a in grid(A.m, 2 * B, inf=False):
        a = tuple(INF if i not in A.support else v for i, v in enumerate(a))
        if contains(A, a):
            out.add(tuple(v if i in J else INF for i, v in enumerate(a)))
    return out


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10 ** 6), st.integers(1, 2))
def test_face_equals_projection_on_grid(seed, m):
    import random
    A = random_basic_set(random.Random(seed), m)
    B = 5
    for J in [frozenset(s) for s in _subsets(A.support)]:
        F = face(A, J)
        limits = _projection_on_grid(A, J, B)
        for b in grid(m, B):
            if frozenset(i for i, v in enumerate(b) if v is not INF) != J:
                continue
            if b in limits:
                assert contains(F, b), (str(A), J, b)


def _subsets(s):
    s = sorted(s)
    return [[s[k] for k in range(len(s)) if mask >> k & 1] for mask in range(1 << len(s))]


def test_face_of_face_and_intersections_on_corpus():
    for A in generate_basic_sets(40, seed=3):
        sups = face_supports(A)
        for H in sups:
            for J in sups:
                assert H & J in sups
        for J in sups:
            FJ = face(A, J)
            for H in sups:
                if H <= J:
                    assert set_equal(face(FJ, H), face(A, H))
