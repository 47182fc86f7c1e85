"""p-adic polytopes in (Q, v_p): pull-backs of valuation precells cut by the unit condition.

A polytope ``S`` over a value precell ``vS`` is the set of rational tuples
``x`` with every ``x_i`` in ``D^M R`` (zero, or ``p^k u`` with ``k >= 0`` and
``u = 1 mod p^M``) and ``v(x)`` in ``vS``.  Everything here factors through the
valuation and residue arithmetic, so it is exact on Q.
"""
from dataclasses import dataclass
from fractions import Fraction

from .bounding import PiecewiseAffineMap
from .core import INF, AffineMap, delta
from .division import boundary_complex, monohedral_division, relative_split, split_monohedral
from .errors import DiscontinuousEpsilon
from .precell import (
    contains, face, faces, facets, find_equal, is_closed, is_monohedral, proper_faces,
    require_valid, to_basic,
)
from .presburger.sets import BasicPresburgerSet, PresburgerSet, intersects, minimum, set_subset


def is_prime(p):
    if p < 2:
        return False
    k = 2
    while k * k <= p:
        if p % k == 0:
            return False
        k += 1
    return True


@dataclass(frozen=True)
class PAdicContext:
    """The prime ``p`` and the congruence precision ``M`` of the unit condition."""

    p: int
    M: int = 1

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")
        if self.M < 1:
            raise ValueError("M must be at least 1")

    @property
    def modulus(self):
        return self.p ** self.M

    def v(self, x):
        return pval(x, self)

    def element(self, a, k=0):
        """``p^a (1 + p^M k)``, or 0 when ``a`` is +inf; lies in ``D^M R`` for ``a >= 0``."""
        if a is INF:
            return Fraction(0)
        return Fraction(self.p) ** a * (1 + self.modulus * Fraction(k))


def _ctx(ctx):
    return ctx if isinstance(ctx, PAdicContext) else PAdicContext(int(ctx))


def _ord(n, p):
    k = 0
    while n % p == 0:
        n //= p
        k += 1
    return k


def pval(x, ctx):
    """``v_p(x)`` for a rational ``x``; +inf at 0."""
    p = _ctx(ctx).p
    x = Fraction(x)
    if x == 0:
        return INF
    return _ord(abs(x.numerator), p) - _ord(x.denominator, p)


def unit_part(x, ctx):
    """``x / p^v(x)`` (a p-adic unit); undefined at 0."""
    c = _ctx(ctx)
    x = Fraction(x)
    return x / Fraction(c.p) ** pval(x, c)


def in_DMR(x, ctx):
    """Membership in ``D^M R``: zero, or non-negative valuation and unit part ``= 1 mod p^M``."""
    c = _ctx(ctx)
    x = Fraction(x)
    if x == 0:
        return True
    if pval(x, c) < 0:
        return False
    u = unit_part(x, c)
    # u = a/b with p coprime to a and b, so u = 1 mod p^M iff a = b mod p^M
    return (u.numerator - u.denominator) % c.modulus == 0


def valuation_vector(x, ctx):
    return tuple(pval(xi, ctx) for xi in x)


def w(x, ctx):
    """``min_i v(x_i)``, +inf for the zero vector."""
    vals = valuation_vector(x, ctx)
    return min(vals, default=INF)


def pi(J, x):
    """Zero the coordinates outside ``J``."""
    return tuple(xi if i in J else Fraction(0) for i, xi in enumerate(x))


def support_of(x):
    return frozenset(i for i, xi in enumerate(x) if xi != 0)


# polytopes --------------------------------------------------------------------------


@dataclass(frozen=True)
class PAdicPolytope:
    """``v^{-1}(value_cell)`` intersected with ``(D^M R)^m``."""

    ctx: PAdicContext
    value_cell: object

    def __post_init__(self):
        require_valid(self.value_cell)

    @property
    def m(self):
        return self.value_cell.m

    @property
    def N(self):
        return self.value_cell.N

    @property
    def support(self):
        return self.value_cell.support

    def contains(self, x):
        return polytope_contains(self, x)

    def __str__(self):
        return f"v^-1({self.value_cell}) in D^{self.ctx.M}R^{self.m} (p={self.ctx.p})"


@dataclass(frozen=True)
class PAdicSet:
    """``v^{-1}`` of a finite union of basic value sets, inside ``(D^M R)^m``."""

    ctx: PAdicContext
    m: int
    value_sets: tuple = ()

    def contains(self, x):
        if len(x) != self.m or not all(in_DMR(xi, self.ctx) for xi in x):
            return False
        a = valuation_vector(x, self.ctx)
        return any(s.contains(a) for s in self.value_sets)

    @property
    def empty(self):
        return not self.value_sets


def polytope_contains(S, x):
    if len(x) != S.m:
        return False
    if not all(in_DMR(xi, S.ctx) for xi in x):
        return False
    return contains(S.value_cell, valuation_vector(x, S.ctx))


def polytope_face(S, J):
    """The face of support ``J``, which equals the coordinate projection ``pi_J(S)``."""
    F = face(S.value_cell, frozenset(J))
    return None if F is None else PAdicPolytope(S.ctx, F)


def polytope_faces(S):
    return [PAdicPolytope(S.ctx, F) for F in faces(S.value_cell)]


def polytope_facets(S):
    return [PAdicPolytope(S.ctx, F) for F in facets(S.value_cell)]


def is_monotope(S):
    return is_monohedral(S.value_cell)


def sample_point(S, a, rng, spread=4):
    """A rational point of ``S`` with valuation vector ``a``: ``x_i = p^{a_i} (1 + p^M k_i)``.

    ``k_i`` is a random p-integral rational, so the unit parts vary.
    """
    c = S.ctx
    out = []
    for ai in a:
        num = rng.randint(-spread, spread)
        den = rng.randint(1, spread)
        while den % c.p == 0:
            den += 1
        out.append(c.element(ai, Fraction(num, den)))
    return tuple(out)


# boundary data ---------------------------------------------------------------------


def _depth(t, J, ctx):
    """``min_{i in J} v(u_i - 1) - M`` for the unit parts ``u_i``; +inf when all are 1."""
    out = INF
    for i in J:
        d = pval(unit_part(t[i], ctx) - 1, ctx)
        if d is not INF:
            out = min(out, d - ctx.M)
    return out


@dataclass(frozen=True)
class ValuationPiece:
    """On ``domain`` (a basic value set of support ``J``): ``v(eps(t)) = L(v(t)) + min(cap, depth(t))``."""

    domain: BasicPresburgerSet
    L: AffineMap
    cap: int = 0

    def __post_init__(self):
        if self.L.infinite or not self.L.integral:
            raise ValueError("valuations of eps must be integral affine maps")
        if self.cap < 0:
            raise ValueError("cap must be non-negative")


@dataclass(frozen=True)
class ValuationPiecewiseMap:
    """``eps : boundary -> K*`` described through ``v o eps``.

    Each piece gives ``v(eps(t))`` as an affine function of ``v(t)`` plus a
    bounded bonus that depends on how close the unit parts of ``t`` are to 1.
    The bonus is locally constant, so the fibrewise maximum over
    ``v^{-1}(b)`` is ``L(b) + cap``, reached at ``t_i = p^{b_i}``.
    """

    m: int
    pieces: tuple = ()

    @classmethod
    def zero(cls, m, supports):
        return cls.from_maps(m, {frozenset(J): AffineMap.constant(frozenset(J), 0)
                                 for J in supports})

    @classmethod
    def from_maps(cls, m, maps, caps=None):
        """One piece per support ``J`` covering the whole slice."""
        caps = caps or {}
        pieces = tuple(ValuationPiece(BasicPresburgerSet.universe(m, J), L.with_domain(J),
                                      caps.get(J, 0))
                       for J, L in sorted(maps.items(), key=lambda kv: sorted(kv[0])))
        return cls(m, pieces)

    def pieces_on(self, J):
        J = frozenset(J)
        return [pc for pc in self.pieces if pc.domain.support == J]

    def _piece_at(self, b):
        J = frozenset(i for i, bi in enumerate(b) if bi is not INF)
        for pc in self.pieces_on(J):
            if pc.domain.contains(b):
                return pc
        return None

    def valuation(self, t, ctx):
        """``v(eps(t))``."""
        b = valuation_vector(t, ctx)
        pc = self._piece_at(b)
        if pc is None:
            raise DiscontinuousEpsilon(f"eps is undefined at valuation {b}")
        J = support_of(t)
        return pc.L(b) + min(pc.cap, _depth(t, J, ctx))

    def evaluate(self, t, ctx):
        """A value ``eps(t)`` in K* with the prescribed valuation."""
        return Fraction(ctx.p) ** self.valuation(t, ctx)

    def fiber_max(self, b):
        """``e`` at valuation ``b``: the largest ``v(eps(t))`` over ``t`` with ``v(t) = b``."""
        pc = self._piece_at(b)
        if pc is None:
            raise DiscontinuousEpsilon(f"eps is undefined at valuation {b}")
        return pc.L(b) + pc.cap

    def g(self):
        """The piecewise affine ``g`` on value faces whose graph is the valuation of ``G_J``."""
        return PiecewiseAffineMap(tuple((pc.domain, pc.L + pc.cap) for pc in self.pieces))

    def check_on(self, S):
        """Raise ``DiscontinuousEpsilon`` unless ``v o eps`` is a function on every proper face.

        On a fixed support slice ``v`` is locally constant, so continuity on a
        face amounts to the pieces covering it and agreeing where they overlap.
        """
        for F in proper_faces(S.value_cell):
            J = F.support
            X = to_basic(F)
            ps = self.pieces_on(J)
            cover = PresburgerSet(self.m, J, tuple(c for pc in ps for c in pc.domain.pieces()))
            if not set_subset(PresburgerSet(self.m, J, tuple(X.pieces())), cover):
                raise DiscontinuousEpsilon(f"eps does not cover the face of support "
                                           f"{sorted(i + 1 for i in J)}")
            for k, p1 in enumerate(ps):
                for p2 in ps[k + 1:]:
                    common = _meet(_meet(p1.domain, p2.domain), X)
                    if common is None:
                        continue
                    diff = p1.L - p2.L
                    if p1.cap != p2.cap or minimum(diff, common) != 0 or minimum(-diff, common) != 0:
                        raise DiscontinuousEpsilon(
                            f"overlapping pieces disagree on support {sorted(i + 1 for i in J)}")


def _meet(a, b):
    if a is None or b is None or not intersects(a, b):
        return None
    return BasicPresburgerSet.from_conj(a.m, a.support, a.conj().conjoin(b.conj()))


# division and splitting ------------------------------------------------------------------


@dataclass(frozen=True)
class MonotopicDivision:
    """Partition of ``S`` with, for each cell, the index in ``T`` of its facet (or ``None``)."""

    S: PAdicPolytope
    U: tuple
    T: tuple
    owner: tuple
    g: PiecewiseAffineMap

    def cells_over(self, k):
        return [u for u, o in zip(self.U, self.owner) if o == k]


def monotopic_division(S, eps=None, T=None, check=True):
    """Divide ``S`` over a boundary complex ``T`` of monotopes with shape control from ``eps``.

    ``g_J`` is the fibrewise maximum of ``v o eps``; the value side is divided
    with ``g`` and the cells are pulled back through ``v``.
    """
    A = S.value_cell
    if T is None:
        D = list(boundary_complex(A))
        T = [PAdicPolytope(S.ctx, d) for d in D]
    else:
        T = list(T)
        for t in T:
            if t.ctx != S.ctx:
                raise ValueError("boundary members use a different context")
        D = [t.value_cell for t in T]
    if eps is None:
        eps = ValuationPiecewiseMap.zero(A.m, {F.support for F in proper_faces(A)})
    if check:
        eps.check_on(S)
    g = eps.g()
    cells = list(monohedral_division(A, g, D, check=check))
    owner = []
    for c in cells:
        fs = facets(c)
        owner.append(find_equal(fs[0], D) if len(fs) == 1 and not is_closed(c) else None)
    return MonotopicDivision(S, tuple(PAdicPolytope(S.ctx, c) for c in cells), tuple(T),
                             tuple(owner), g)


def w_inequality_violations(result, eps, rng, samples=200, B=6):
    """Sample points ``u`` of owner cells and list those with ``w(u - pi_J(u)) < v(eps(pi_J(u)))``.

    Returns ``(checked, violations)``.
    """
    from .oracle import points_with_support

    ctx = result.S.ctx
    pools = []
    for u_cell, k in zip(result.U, result.owner):
        if k is None:
            continue
        J = result.T[k].support
        pts = [a for a in points_with_support(u_cell.m, u_cell.support, B)
               if contains(u_cell.value_cell, a)]
        if pts:
            pools.append((u_cell, J, pts))
    checked, bad = 0, []
    if not pools:
        return checked, bad
    for s in range(samples):
        u_cell, J, pts = pools[s % len(pools)]
        a = rng.choice(pts)
        u = sample_point(u_cell, a, rng)
        base = pi(J, u)
        diff = tuple(x - y for x, y in zip(u, base))
        lhs, rhs = w(diff, ctx), eps.valuation(base, ctx)
        checked += 1
        if lhs < rhs or lhs != delta(J, valuation_vector(u, ctx)):
            bad.append((u, J, lhs, rhs))
    return checked, bad


def split_polytope(S, n, check=True):
    """``n`` monotopes partitioning the non-closed monotope ``S``, each with frontier that of ``S``."""
    _, cells = split_monohedral(S.value_cell, n, check=check)
    return [PAdicPolytope(S.ctx, c) for c in cells]


def relative_split_polytope(members, n, check=True):
    """Split the union of a relatively open complex of monotopes into ``n`` sets with equal frontier.

    Parts may be empty (a closed minimal member keeps everything in the first part).
    """
    members = list(members)
    if not members:
        raise ValueError("no members")
    ctx, m = members[0].ctx, members[0].m
    parts = relative_split([s.value_cell for s in members], n, check=check)
    return [PAdicSet(ctx, m, tuple(p)) for p in parts]


__all__ = [
    "MonotopicDivision", "PAdicContext", "PAdicPolytope", "PAdicSet", "ValuationPiece",
    "ValuationPiecewiseMap", "in_DMR", "is_monotope", "is_prime", "monotopic_division",
    "pi", "polytope_contains", "polytope_face", "polytope_faces", "polytope_facets", "pval",
    "relative_split_polytope", "sample_point", "split_polytope", "support_of", "unit_part",
    "valuation_vector", "w", "w_inequality_violations",
]
