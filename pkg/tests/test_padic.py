import random
from fractions import Fraction as Q

import pytest
from hypothesis import given, settings, strategies as st

from gammacell.core import INF, AffineMap, delta
from gammacell.errors import ClosedInput, CoverMismatch, DiscontinuousEpsilon
from gammacell.padic import (
    PAdicContext, PAdicPolytope, ValuationPiecewiseMap, in_DMR, monotopic_division, pi,
    polytope_contains, polytope_face, pval, relative_split_polytope, sample_point,
    split_polytope, valuation_vector, w, w_inequality_violations,
)
from gammacell.precell import contains, face, proper_faces, tower

from helpers import grid, nn, sup, wedge

P3 = PAdicContext(3, 1)


def _ord(n, p):
    """Exponent of ``p`` in the integer ``n`` by trial division."""
    k = 0
    while n and n % p == 0:
        n, k = n // p, k + 1
    return k


def test_pval_examples():
    assert pval(Q(9, 2), P3) == 2
    assert pval(Q(1, 3), P3) == -1
    assert pval(0, PAdicContext(2)) is INF
    assert pval(-Q(50, 7), PAdicContext(5)) == 2


@given(st.integers(-10 ** 6, 10 ** 6).filter(bool), st.integers(1, 10 ** 6),
       st.sampled_from([2, 3, 5, 7]))
def test_pval_against_trial_division(a, b, p):
    x = Q(a, b)
    assert pval(x, PAdicContext(p)) == _ord(abs(x.numerator), p) - _ord(x.denominator, p)


def test_in_dmr_examples():
    assert in_DMR(4, P3)
    assert not in_DMR(2, P3)
    assert in_DMR(0, P3)
    assert not in_DMR(Q(1, 3), P3)
    assert in_DMR(Q(9 * 4, 7), P3)     # unit 4/7 = 1 mod 3
    assert not in_DMR(4, PAdicContext(3, 2))
    assert in_DMR(10, PAdicContext(3, 2))


@given(st.integers(-500, 500), st.integers(1, 500), st.sampled_from([(2, 1), (2, 3), (3, 1), (3, 2), (5, 1)]))
def test_in_dmr_by_residues(a, b, pm):
    p, M = pm
    x = Q(a, b)
    if x == 0:
        return
    k = pval(x, PAdicContext(p))
    u = x / Q(p) ** k
    # u = 1 mod p^M  iff  p^M divides u - 1 in the p-adic integers
    expect = k >= 0 and pval(u - 1, PAdicContext(p)) >= M if u != 1 else k >= 0
    assert in_DMR(x, PAdicContext(p, M)) == expect


def test_context_checks():
    with pytest.raises(ValueError):
        PAdicContext(4)
    with pytest.raises(ValueError):
        PAdicContext(3, 0)


def test_polytope_membership_examples():
    S = PAdicPolytope(P3, wedge())
    assert polytope_contains(S, (Q(1), Q(9)))
    assert not polytope_contains(S, (Q(1), Q(2)))
    assert not polytope_contains(S, (Q(0), Q(1)))
    # zero coordinates belong to faces, not to S
    assert not polytope_contains(S, (Q(3), Q(0)))
    assert polytope_contains(polytope_face(S, sup(1)), (Q(3), Q(0)))
    assert polytope_contains(polytope_face(S, sup()), (Q(0), Q(0)))


@settings(max_examples=60)
@given(st.lists(st.integers(-40, 40), min_size=2, max_size=2),
       st.lists(st.integers(1, 40), min_size=2, max_size=2), st.integers(0, 3), st.integers(0, 3))
def test_membership_round_trip(nums, dens, s0, s1):
    S = PAdicPolytope(P3, wedge())
    x = tuple(Q(n, d) * 3 ** s for n, d, s in zip(nums, dens, (s0, s1)))
    expect = contains(wedge(), valuation_vector(x, P3)) and all(in_DMR(xi, P3) for xi in x)
    assert polytope_contains(S, x) == expect


def test_face_transfer():
    S = PAdicPolytope(P3, wedge())
    T = polytope_face(S, sup(1))
    assert T is not None and T.support == sup(1)
    x = (Q(1), Q(9))
    assert polytope_contains(T, pi(sup(1), x)) and pi(sup(1), x) == (1, 0)
    assert polytope_face(S, sup(2)) is None
    assert polytope_face(S, sup(1, 2)).value_cell.support == sup(1, 2)


@settings(max_examples=40)
@given(st.integers(0, 6), st.integers(0, 6), st.sampled_from([1, 2]))
def test_witness_powers(a1, a2, M):
    # for every value point there is a rational witness, namely p^a
    ctx = PAdicContext(3, M)
    A = nn()
    a = (a1, a2)
    x = tuple(ctx.element(ai) for ai in a)
    assert x == (Q(3) ** a1, Q(3) ** a2)
    assert polytope_contains(PAdicPolytope(ctx, A), x)
    assert valuation_vector(x, ctx) == a


@settings(max_examples=60)
@given(st.integers(0, 1000))
def test_w_matches_delta(seed):
    rng = random.Random(seed)
    S = PAdicPolytope(P3, nn())
    a = (rng.randint(0, 5), rng.randint(0, 5))
    u = sample_point(S, a, rng)
    assert polytope_contains(S, u)
    for J in (sup(), sup(1), sup(2)):
        diff = tuple(x - y for x, y in zip(u, pi(J, u)))
        assert w(diff, P3) == delta(J, valuation_vector(u, P3))


def _division_partitions(res, B=5):
    for a in grid(res.S.m, B):
        hits = [k for k, u in enumerate(res.U) if contains(u.value_cell, a)]
        assert len(hits) == contains(res.S.value_cell, a)


def test_monotopic_division_zero():
    S = PAdicPolytope(P3, nn())
    res = monotopic_division(S)
    _division_partitions(res)
    assert len(res.owner) == len(res.U)
    assert all(k is None or 0 <= k < len(res.T) for k in res.owner)
    checked, bad = w_inequality_violations(res, ValuationPiecewiseMap.zero(2, [t.support for t in res.T]),
                                           random.Random(0))
    assert checked == 200 and not bad


def test_monotopic_division_first_coordinate():
    S = PAdicPolytope(P3, nn())
    supports = [F.support for F in proper_faces(nn())]
    maps = {J: (AffineMap.make(J, 0, {0: 1}) if 0 in J else AffineMap.constant(J, 0))
            for J in supports}
    eps = ValuationPiecewiseMap.from_maps(2, maps)
    res = monotopic_division(S, eps)
    _division_partitions(res)
    checked, bad = w_inequality_violations(res, eps, random.Random(1), samples=200)
    assert checked == 200 and not bad, bad[:3]


def test_cover_mismatch():
    S = PAdicPolytope(P3, nn())
    A = nn()
    T = [PAdicPolytope(P3, face(A, sup(1))), PAdicPolytope(P3, face(A, sup()))]
    with pytest.raises(CoverMismatch):
        monotopic_division(S, T=T)


def test_discontinuous_epsilon():
    S = PAdicPolytope(P3, nn())
    # nothing on the face of support {2}
    eps = ValuationPiecewiseMap.from_maps(2, {sup(1): AffineMap.constant(sup(1), 0),
                                              sup(): AffineMap.constant(sup(), 0)})
    with pytest.raises(DiscontinuousEpsilon):
        monotopic_division(S, eps)


def test_split_polytope():
    ctx = P3
    S = PAdicPolytope(ctx, tower([(0,)]))
    parts = split_polytope(S, 2)
    rng = random.Random(3)
    for v in range(10):
        x = sample_point(S, (v,), rng)
        hits = [k for k, part in enumerate(parts) if polytope_contains(part, x)]
        assert len(hits) == 1
        assert contains(parts[hits[0]].value_cell, (v + 2,))
        assert not contains(parts[hits[0]].value_cell, (v + 1,))
    assert split_polytope(S, 1)[0].value_cell == S.value_cell
    with pytest.raises(ClosedInput):
        split_polytope(PAdicPolytope(ctx, tower([(0, 2)])), 2)


def test_relative_split_polytope_pads_closed():
    closed = PAdicPolytope(P3, tower([(1, 3)]))
    parts = relative_split_polytope([closed], 3)
    assert parts[1].empty and parts[2].empty
    assert parts[0].contains((Q(3),)) and parts[0].contains((Q(27),))
    assert not parts[0].contains((Q(1),))
