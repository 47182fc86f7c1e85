"""Facet inflation, monohedral division and decomposition, splitting.

``inflate_facet`` is the workhorse: given a facet ``B`` of a precell ``A`` and a
family ``D`` of precells covering ``B``, it carves out of ``A`` one precell
``C_D`` per member of ``D`` hugging ``D`` (and nothing else of the frontier),
leaving a remainder family ``U`` whose frontier avoids ``B``.  The recursion
follows the shape of the tower: the last coordinate is either +inf on ``B``
with the same socle (case "1"), +inf on ``B`` over a socle facet (case "2"),
or finite on ``B`` with a bounded (case "3.1") or unbounded (case "3.2")
fibre in ``A``.
"""
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction

from .bounding import PiecewiseAffineMap, dominate_affine, minorize_affine
from .core import INF, AffineMap
from .errors import (
    ClosedInput, CoverMismatch, NotAComplex, NotAFacet, NotMonohedral, NotRelativelyOpen,
)
from .precell import (
    Precell, PrecellComplex, check_complex, equal, extension, face, faces, facets,
    find_equal, is_closed, is_monohedral, proper_faces, require_valid, subset, to_basic,
)
from .presburger import engine
from .presburger.sets import BasicPresburgerSet, PresburgerSet, set_equal, skolem_threshold

# how often each branch of the inflation recursion ran; "3.1b" marks the
# bounded-fibre variant of case 3.1 (see _case31_bounded)
CASE_COUNTS = Counter()


@dataclass(frozen=True)
class InflationResult:
    """``C[k]`` is the cell inflated from ``D[k]``; ``U`` partitions the rest of ``A``."""

    D: tuple
    C: tuple
    U: tuple
    delta: AffineMap

    def cell_for(self, d):
        for k, e in enumerate(self.D):
            if e is d or equal(e, d):
                return self.C[k]
        raise KeyError(d)

    def pairs(self):
        return list(zip(self.D, self.C))


# helpers ---------------------------------------------------------------------


def pullback(s, cell):
    """``s`` intersected with the preimage of ``cell`` under the projection to its support.

    ``s`` and ``cell`` are basic sets (or precells); the support of ``cell``
    must be contained in that of ``s``.
    """
    s = to_basic(s) if isinstance(s, Precell) else s
    cell = to_basic(cell) if isinstance(cell, Precell) else cell
    if not cell.support <= s.support:
        raise ValueError("pullback needs the cell support inside the set support")
    return BasicPresburgerSet.from_conj(s.m, s.support, s.conj().conjoin(cell.conj()))


def _unique_socles(D):
    uniq, idx = [], []
    for d in D:
        k = find_equal(d.socle, uniq)
        if k is None:
            uniq.append(d.socle)
            k = len(uniq) - 1
        idx.append(k)
    return uniq, idx


def _coordinate(domain, i):
    return AffineMap.make(domain, 0, {i: 1})


def _boundary_maps(f, J):
    """Maps of a boundary function on the face of support ``J``."""
    J = frozenset(J)
    if f is None:
        return [AffineMap.constant(J, 0)]
    if isinstance(f, AffineMap):
        return [f.with_domain(J)]
    if isinstance(f, PiecewiseAffineMap):
        maps = [g for d, g in f.pieces if d.support == J]
        return maps or [AffineMap.constant(J, 0)]
    return [g for g in f(J)] if callable(f) else list(f)


def coordinate_sum_boundary(m, supports, scale=1):
    """The boundary function ``b -> scale * sum of the finite coordinates of b``."""
    return PiecewiseAffineMap.on_supports(
        m, supports, lambda J: AffineMap.coordinate_sum(J, 0, scale))


def union_of(cells, m, support):
    """The union of same-support cells as one ``PresburgerSet``."""
    parts = []
    for c in cells:
        parts.extend(to_basic(c).pieces())
    return PresburgerSet(m, frozenset(support), tuple(parts))


def _covers(cells, target):
    return set_equal(union_of(cells, target.m, target.support), to_basic(target))


# facet inflation ----------------------------------------------------------------


def _facet_of(A, B):
    for F in facets(A):
        if F.support == B.support:
            if not equal(F, B):
                raise NotAFacet("the given set differs from the facet with its support")
            return F
    raise NotAFacet("not a facet of the precell")


def inflate_facet(A, B, f=None, D=None, check=True):
    """Inflate the cover ``D`` of the facet ``B`` of ``A`` into cells of ``A``.

    ``f`` bounds the cells from below in the sense ``Delta_J >= f o pi_J``
    (``J`` the support of ``B``); it may be an ``AffineMap`` on ``B``, a
    ``PiecewiseAffineMap`` or ``None`` (zero).  It is first replaced by an
    integrally affine map ``beta + alpha * sum_J x_j`` above it.
    """
    if is_closed(A):
        raise NotAFacet("a closed precell has no facets")
    B = _facet_of(A, B)
    D = [B] if D is None else list(D)
    if check:
        require_valid(A)
        for d in D:
            require_valid(d)
            if not is_monohedral(d):
                raise NotMonohedral(f"{d} is not monohedral")
            if d.support != B.support or not subset(d, B):
                raise CoverMismatch(f"{d} does not lie in the facet")
        if not _covers(D, B):
            raise CoverMismatch("the family does not cover the facet")
    f = dominate_affine(B, _boundary_maps(f, B.support))
    return _inflate(A, B, f, D)


def _inflate(A, B, f, D):
    """Recursive core; ``f`` is already of the form ``beta + alpha * sum_J x_j``."""
    if not A.last:
        CASE_COUNTS["socle"] += 1
        sub = _inflate(A.socle, B.socle, f, [d.socle for d in D])
        lift = lambda c: Precell.at_infinity(c, A.modulus)
        return InflationResult(tuple(D), tuple(lift(c) for c in sub.C),
                               tuple(lift(u) for u in sub.U), sub.delta)
    if not B.last and B.socle.support == A.socle.support:
        return _case1(A, B, f, D)
    if not B.last:
        return _case2(A, B, f, D)
    if A.nu.infinite:
        return _case32(A, B, f, D)
    return _case31(A, B, f, D)


def _case1(A, B, f, D):
    # B = X x {+inf}: cut A at a level lam above mu + N and above f
    CASE_COUNTS["1"] += 1
    X, N = A.socle, A.modulus
    lam = dominate_affine(X, [f.with_domain(X.support), A.mu + N])
    U = Precell.over(X, A.mu, lam, A.rho, N)
    C = tuple(Precell.over(d.socle, lam + 1, INF, A.rho, N) for d in D)
    return InflationResult(tuple(D), C, (U,), lam.with_domain(B.support))


def _case2(A, B, f, D):
    # B = Y x {+inf} with Y a facet of the socle: inflate in the socle, then lift
    CASE_COUNTS["2"] += 1
    X, Y, N = A.socle, B.socle, A.modulus
    Jh = Y.support
    eta = skolem_threshold(to_basic(X), Jh, A.mu, f.with_domain(Jh))
    g = dominate_affine(Y, [f.with_domain(Jh), eta])
    Dh, idx = _unique_socles(D)
    sub = _inflate(X, Y, g, Dh)
    over = lambda c: Precell.over(c, A.mu, A.nu, A.rho, N)
    C = tuple(over(sub.C[k]) for k in idx)
    return InflationResult(tuple(D), C, tuple(over(w) for w in sub.U),
                           sub.delta.with_domain(B.support))


def _split_f(f, t, Jh):
    """``f(y, t) = f0(y) + alpha * t`` on a face whose last coordinate is finite."""
    alpha = f.coeff(t)
    f0 = f.substitute(t, AffineMap.constant(Jh, 0)).with_domain(Jh)
    return f0, alpha


def _case31(A, B, f, D):
    t = A.m - 1
    X, Y, N = A.socle, B.socle, A.modulus
    Jh, I = Y.support, A.support
    if not extension(X, Jh, A.nu).infinite:
        return _case31_bounded(A, B, f, D)
    CASE_COUNTS["3.1"] += 1
    f0, alpha = _split_f(f, t, Jh)
    mu_bar = extension(X, Jh, A.mu)
    XB = to_basic(X)

    # step 1: restrict the socle to X0 near Y, where nu - mu is large
    g = dominate_affine(Y, [f0 + (mu_bar + N).scale(alpha)])
    gap = A.nu - A.mu
    eta1 = skolem_threshold(XB, Jh, gap, g + (2 * N + 1) + Fraction(1, gap.denominator()))
    s1 = _inflate(X, Y, dominate_affine(Y, [eta1, g.scale(2)]), [Y])
    X0, W1, eps1 = s1.C[0], s1.U, s1.delta
    g_up = g.with_domain(I - {t})
    bounds = [gap - (2 * N + 1)]
    bounds += [(_coordinate(I - {t}, k) - g_up).scale(Fraction(1, alpha))
               for k in sorted((I - {t}) - Jh)]
    lam = minorize_affine(X0, bounds, check=False)
    zeta = A.mu + lam + N
    n = zeta.denominator()
    V = Precell.over(X0, zeta + Fraction(1, n), A.nu, A.rho, N)

    # step 2: inflate each socle of D inside X0, under the ceiling zeta
    Dh, idx = _unique_socles(D)
    X0B = to_basic(X0)
    etas = []
    for d in D:
        zeta_d = d.mu + N if d.nu.infinite else d.nu
        etas.append(skolem_threshold(pullback(X0B, d.socle), Jh, zeta, zeta_d))
    eta2 = dominate_affine(Y, etas)
    s2 = _inflate(X0, Y, eta2, Dh)
    C = []
    for k, d in zip(idx, D):
        hi = zeta if d.nu.infinite else d.nu
        C.append(Precell.over(s2.C[k], d.mu, hi, A.rho, N))
    U = [Precell.over(w, A.mu, A.nu, A.rho, N) for w in W1]
    U.append(V)
    U += [Precell.over(w, A.mu, zeta, A.rho, N) for w in s2.U]

    # delta: beyond it a point sits in X0, under zeta and over S_D
    lower = to_basic(Precell.over(X0, A.mu, A.nu, A.rho, N))
    eta3 = skolem_threshold(lower, B.support, zeta.with_domain(I) - _coordinate(I, t),
                            AffineMap.constant(B.support, 0))
    J = B.support
    delta = dominate_affine(B, [eps1.with_domain(J), eta3, s2.delta.with_domain(J)])
    return InflationResult(tuple(D), tuple(C), tuple(U), delta)


def _case31_bounded(A, B, f, D):
    """Case 3.1 when ``nu`` stays finite on ``Y``.

    Then ``mu`` and ``nu`` factor through the projection to ``Y`` and the
    fibres of ``A`` are those of ``B``, so no ceiling is needed: inflate the
    socles of ``D`` with the threshold ``f(y, 0) + alpha * nu_bar(y)`` and
    reuse the fibres of each ``D``.
    """
    CASE_COUNTS["3.1b"] += 1
    t = A.m - 1
    X, Y, N = A.socle, B.socle, A.modulus
    Jh = Y.support
    f0, alpha = _split_f(f, t, Jh)
    nu_bar = extension(X, Jh, A.nu)
    h = dominate_affine(Y, [f0 + nu_bar.scale(alpha)])
    Dh, idx = _unique_socles(D)
    sub = _inflate(X, Y, h, Dh)
    C = tuple(Precell.over(sub.C[k], d.mu, d.nu, A.rho, N) for k, d in zip(idx, D))
    U = tuple(Precell.over(w, A.mu, A.nu, A.rho, N) for w in sub.U)
    return InflationResult(tuple(D), C, U, sub.delta.with_domain(B.support))


def _case32(A, B, f, D):
    # unbounded fibres: cut at lam, handle the lower part, keep the upper part whole
    CASE_COUNTS["3.2"] += 1
    t = A.m - 1
    X, N, I, J = A.socle, A.modulus, A.support, B.support
    lam = dominate_affine(X, [A.mu + N])
    lower = Precell.over(X, A.mu, lam, A.rho, N)
    upper = Precell.over(X, lam + 1, INF, A.rho, N)
    sub = _case31(lower, B, f, D)
    eta = skolem_threshold(to_basic(A), J, lam.with_domain(I) - _coordinate(I, t),
                           AffineMap.constant(J, 0))
    delta = dominate_affine(B, [eta, sub.delta])
    return InflationResult(sub.D, sub.C, sub.U + (upper,), delta)


# division and decomposition -------------------------------------------------------


def check_boundary_cover(A, D):
    """Raise ``CoverMismatch`` unless ``D`` covers exactly the frontier of ``A``."""
    proper = {F.support: F for F in proper_faces(A)}
    for d in D:
        if d.support not in proper or not subset(d, proper[d.support]):
            raise CoverMismatch(f"{d} is not inside the frontier")
    for J, F in proper.items():
        members = [d for d in D if d.support == J]
        if not members or not _covers(members, F):
            raise CoverMismatch(f"the face {F} is not covered")


def monohedral_division(A, f=None, D=None, check=True):
    """Partition ``A`` into monohedral cells compatible with the boundary complex ``D``.

    ``D`` defaults to ``boundary_complex(A)``.  Returns a ``PrecellComplex`` of the new cells (the cells of
    ``D`` are not repeated).
    """
    D = list(boundary_complex(A) if D is None else D)
    if check:
        require_valid(A)
        ok, why = check_complex(D)
        if not ok:
            raise NotAComplex(why)
        for d in D:
            if not is_monohedral(d):
                raise NotMonohedral(f"{d} is not monohedral")
        check_boundary_cover(A, D)
    return PrecellComplex(_divide(A, f, D))


def _divide(A, f, D):
    if is_closed(A):
        return [A]
    B = facets(A)[0]
    DB = [d for d in D if d.support == B.support]
    res = _inflate(A, B, dominate_affine(B, _boundary_maps(f, B.support)), DB)
    out = list(res.C)
    for U in res.U:
        supports = {F.support for F in proper_faces(U)}
        out.extend(_divide(U, f, [d for d in D if d.support in supports]))
    return out


def _refine_faces(face_list):
    """Monohedral closed complex refining a closed family listed smallest first.

    Each face is kept whole when it is monohedral and its own faces survived
    unrefined, and divided over the cells already built on its frontier
    otherwise.
    """
    built = []
    for F in face_list:
        proper = {G.support for G in proper_faces(F)}
        below = [c for c in built if c.support in proper]
        untouched = all(sum(c.support == J for c in below) == 1 for J in proper)
        if is_monohedral(F) and untouched:
            built.append(F)
            continue
        built.extend(_divide(F, None, below))
    return built


def boundary_complex(A):
    """A closed complex of monohedral cells covering the frontier of ``A``."""
    return PrecellComplex(_refine_faces(proper_faces(A)))


def monohedral_decomposition(A, check=True):
    """A closed complex of monohedral cells whose union is the closure of ``A``."""
    if check:
        require_valid(A)
    return PrecellComplex(_refine_faces(faces(A)))


def cells_of(complex_, A):
    """Members of a decomposition of ``A`` that lie in ``A`` itself."""
    return [c for c in complex_ if c.support == A.support]


# splitting --------------------------------------------------------------------------


def split_monohedral(A, n, check=True):
    """Partition a non-closed monohedral precell into ``n`` cells with its frontier.

    Returns ``(N', cells)`` where the cells are precells mod ``N'``.
    """
    if check:
        require_valid(A)
        if is_closed(A):
            raise ClosedInput("a closed precell cannot be split with equal frontiers")
        if not is_monohedral(A):
            raise NotMonohedral(f"{A} is not monohedral")
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return A.N, [A]
    return _split(A, n)


def _split(A, n):
    if not A.last:
        N, cells = _split(A.socle, n)
        return N + (A.modulus,), [Precell.at_infinity(c, A.modulus) for c in cells]
    N = A.modulus
    if A.nu.infinite:
        big = n * N
        cells = [Precell.over(A.socle, A.mu, INF, (A.rho + i * N) % big, big)
                 for i in range(1, n + 1)]
        return A.socle.N + (big,), cells
    Ns, socles = _split(A.socle, n)
    return Ns + (N,), [Precell.over(s, A.mu, A.nu, A.rho, N) for s in socles]


def _specializes(lower, upper):
    """``lower <= upper``: ``lower`` is a face of ``upper``."""
    F = face(upper, lower.support)
    return F is not None and equal(F, lower)


def relative_split(members, n, check=True):
    """Split the union of a complex of monohedral precells into ``n`` parts with its frontier.

    The union must be relatively open.  Returns ``n`` lists of basic sets;
    the k-th list describes the k-th part.
    """
    members = list(members)
    if check:
        for c in members:
            require_valid(c)
            if not is_monohedral(c):
                raise NotMonohedral(f"{c} is not monohedral")
        ok, why = check_complex(members)
        if not ok:
            raise NotAComplex(why)
        _check_relatively_open(members)
    parts = [[] for _ in range(n)]
    minimal = [u for u in members
               if not any(v is not u and v.support < u.support and _specializes(v, u)
                          for v in members)]
    for u0 in minimal:
        above = [s for s in members if s is u0 or _specializes(u0, s)]
        if is_closed(u0):
            parts[0].extend(to_basic(s) for s in above)
            continue
        _, pieces = split_monohedral(u0, n, check=False)
        for k, piece in enumerate(pieces):
            for s in above:
                p = pullback(to_basic(s), piece)
                if engine.is_sat(p.conj()):
                    parts[k].append(p)
    return parts


def _check_relatively_open(members):
    rest = []
    for c in members:
        for F in faces(c):
            if find_equal(F, members) is None and find_equal(F, rest) is None:
                rest.append(F)
    for T in rest:
        for F in faces(T):
            if find_equal(F, members) is not None:
                raise NotRelativelyOpen(f"{F} is a member but lies in the closure of the complement")


__all__ = [
    "CASE_COUNTS", "InflationResult", "inflate_facet", "monohedral_division",
    "monohedral_decomposition", "split_monohedral", "relative_split", "pullback",
    "coordinate_sum_boundary", "boundary_complex", "check_boundary_cover", "cells_of", "union_of",
]
