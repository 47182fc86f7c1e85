"""Presburger subsets of a support slice of Gamma^m and their face operations.

A ``BasicPresburgerSet`` is one conjunction of integral inequalities and
congruences on the coordinates of its support ``I``; its points are exactly the
points of ``Gamma^m`` with support ``I`` satisfying the constraints.  A
``PresburgerSet`` is a finite union of such conjunctions on a common support,
which is what projections and faces produce in general.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from ..core import INF, AffineMap, lcm, support as point_support
from ..errors import EmptyFace, EmptySet, NoThreshold, Unbounded
from ..linalg import nullspace, solve
from . import engine, fm
from .formula import Atom, from_dnf


def _dense(coefs, m):
    row = [0] * m
    for v, c in coefs:
        row[v] = c
    return tuple(row)


def _sparse(row):
    return tuple((i, c) for i, c in enumerate(row) if c)


@dataclass(frozen=True)
class BasicPresburgerSet:
    """``phi(x) >= gamma`` rows and ``psi(x) = rho (mod n)`` rows on support ``I``.

    Coefficient rows are dense tuples of length ``m`` that vanish off the support.
    """

    m: int
    support: frozenset
    inequalities: tuple = ()
    congruences: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "support", frozenset(self.support))
        for row, _ in self.inequalities:
            self._check_row(row)
        for row, rho, n in self.congruences:
            self._check_row(row)
            if n < 1 or not 0 <= rho < n:
                raise ValueError(f"congruence residue {rho} must lie in [0, {n})")

    def _check_row(self, row):
        if len(row) != self.m:
            raise ValueError("coefficient row has the wrong length")
        for i, c in enumerate(row):
            if c and i not in self.support:
                raise ValueError(f"coefficient on x{i + 1}, which is outside the support")
            if int(c) != c:
                raise ValueError("coefficients must be integers")

    @classmethod
    def from_atoms(cls, m, support, atoms=()):
        conj = engine.Conj()
        for a in atoms:
            if not conj.add_atom(a.as_tuple() if isinstance(a, Atom) else a):
                return cls.empty(m, support)
        return cls.from_conj(m, support, conj)

    @classmethod
    def from_conj(cls, m, support, conj):
        if conj is None:
            return cls.empty(m, support)
        ineqs, congs = [], []
        for coefs, k in conj.eq.items():
            ineqs.append((_dense(coefs, m), -k))
            ineqs.append((_dense(engine._neg(coefs), m), k))
        for coefs, k in conj.ge.items():
            ineqs.append((_dense(coefs, m), -k))
        for (n, coefs), k in conj.dv.items():
            congs.append((_dense(coefs, m), (-k) % n, n))
        return cls(m, frozenset(support), tuple(sorted(ineqs)), tuple(sorted(congs)))

    @classmethod
    def empty(cls, m, support):
        return cls(m, frozenset(support), (((0,) * m, 1),))

    @classmethod
    def universe(cls, m, support):
        return cls(m, frozenset(support))

    @classmethod
    def orthant(cls, m, support):
        rows = tuple(sorted((tuple(int(j == i) for j in range(m)), 0) for i in support))
        return cls(m, frozenset(support), rows)

    def conj(self):
        return _conj_of(self)

    def pieces(self):
        c = self.conj()
        return () if c is None else (c,)

    def formula(self):
        return from_dnf(list(self.pieces()))

    def contains(self, a):
        return contains(self, a)

    def intersect(self, other):
        assert self.m == other.m and self.support == other.support
        return BasicPresburgerSet(self.m, self.support,
                                  tuple(sorted(set(self.inequalities) | set(other.inequalities))),
                                  tuple(sorted(set(self.congruences) | set(other.congruences))))

    def with_atoms(self, atoms):
        c = self.conj()
        if c is None:
            return self
        c = c.copy()
        for a in atoms:
            if not c.add_atom(a.as_tuple() if isinstance(a, Atom) else a):
                return BasicPresburgerSet.empty(self.m, self.support)
        return BasicPresburgerSet.from_conj(self.m, self.support, c)

    def __str__(self):
        from .formula import conj_to_text
        c = self.conj()
        body = "false" if c is None else conj_to_text(c)
        sup = ",".join(str(i + 1) for i in sorted(self.support))
        return f"{{support {{{sup}}}: {body}}}"


@lru_cache(maxsize=None)
def _conj_of(s):
    c = engine.Conj()
    for row, gamma in s.inequalities:
        if not c.add_ge(_sparse(row), -gamma):
            return None
    for row, rho, n in s.congruences:
        if not c.add_dv(n, _sparse(row), -rho):
            return None
    return c


@dataclass(frozen=True)
class PresburgerSet:
    """Finite union of conjunctions (``engine.Conj``) on a common support."""

    m: int
    support: frozenset
    parts: tuple = ()

    def pieces(self):
        return self.parts

    def formula(self):
        return from_dnf(list(self.parts))

    def contains(self, a):
        return contains(self, a)

    def __str__(self):
        from .formula import dnf_to_text
        sup = ",".join(str(i + 1) for i in sorted(self.support))
        return f"{{support {{{sup}}}: {dnf_to_text(self.parts)}}}"


def as_union(s):
    if isinstance(s, PresburgerSet):
        return s
    return PresburgerSet(s.m, s.support, s.pieces())


def union(sets, m=None, support=None):
    sets = list(sets)
    if sets:
        m, support = sets[0].m, sets[0].support
    parts = []
    for s in sets:
        assert s.support == support
        parts.extend(s.pieces())
    return PresburgerSet(m, frozenset(support), tuple(engine._dedupe(parts)))


def _assign(a, sup):
    return {i: a[i] for i in sup}


def contains(s, a):
    if len(a) != s.m or point_support(a) != s.support:
        return False
    values = _assign(a, s.support)
    return any(c.holds({**values, **{v: 0 for v in c.variables() - values.keys()}})
               for c in s.pieces())


def is_empty(s):
    return not engine.dnf_sat(s.pieces())


def find_point(s):
    """Some point of ``s`` (a tuple with ``INF`` off the support), or ``None``."""
    for c in s.pieces():
        model = engine.find_model(c)
        if model is not None:
            return tuple(model.get(i, 0) if i in s.support else INF for i in range(s.m))
    return None


def set_subset(a, b):
    if a.m != b.m:
        raise ValueError("ambient dimensions differ")
    if a.support != b.support:
        return is_empty(a)
    return not engine.dnf_subtract(list(a.pieces()), list(b.pieces()))


def set_equal(a, b):
    return set_subset(a, b) and set_subset(b, a)


def intersects(a, b):
    if a.support != b.support:
        return False
    return bool(engine.dnf_sat(engine.dnf_and(list(a.pieces()), list(b.pieces()))))


def minimum(f, s):
    """Least value of the affine map ``f`` on ``s``."""
    if f.infinite:
        return INF
    den = f.denominator()
    scaled = f.scale(den)
    coefs = tuple(sorted((i, int(c)) for i, c in scaled.coeffs if c))
    const = int(scaled.const)
    best = None
    for piece in s.pieces():
        value = _piece_minimum(piece, coefs)
        if value is not None and (best is None or value < best):
            best = value
    if best is None:
        raise EmptySet("minimum over an empty set")
    return Fraction(best + const, den)


def _piece_minimum(conj, coefs):
    """Least integer value of ``coefs . x`` on ``conj``, ``None`` when empty.

    A rational lower bound comes from Fourier-Motzkin on the relaxation; the
    integer optimum is then located by bisection with feasibility tests, which
    keeps the objective out of the eliminated system.
    """
    model = engine.find_model(conj)
    if model is None:
        return None
    hi = sum(c * model.get(v, 0) for v, c in coefs)
    lower = _relaxed_lower_bound(conj, coefs)
    if lower is None:
        raise Unbounded("affine map is unbounded below")
    lo = -((-lower.numerator) // lower.denominator)
    while lo < hi:
        mid = (lo + hi) // 2
        probe = conj.copy()
        # mid - coefs . x >= 0
        if probe.add_ge(tuple((v, -c) for v, c in coefs), mid) and engine.is_sat(probe):
            hi = mid
        else:
            lo = mid + 1
    return hi


def _relaxed_lower_bound(conj, coefs):
    """Rational lower bound of ``coefs . x`` on the real relaxation, ``None`` if unbounded."""
    if not coefs:
        return Fraction(0)
    vs = sorted(conj.variables() | {v for v, _ in coefs})
    idx = {v: k + 1 for k, v in enumerate(vs)}
    n = len(vs) + 1

    def row(cs, sign):
        r = [0] * n
        for v, c in cs:
            r[idx[v]] = sign * c
        return r

    rows = []
    for cs, k in conj.ge.items():
        rows.append((row(cs, 1), k))
    for cs, k in conj.eq.items():
        rows.append((row(cs, 1), k))
        rows.append((row(cs, -1), -k))
    # objective variable u_0 = coefs . x
    obj = row(coefs, 1)
    obj[0] = -1
    rows.append((obj, 0))
    rows.append(([-c for c in obj], 0))
    cur = fm._clean(rows)
    for k in range(n - 1, 0, -1):
        if cur is None:
            break
        cur = fm._eliminate(cur, k)
    if cur is None:
        return None
    lower = None
    for cs, k in cur:
        if cs[0] > 0:
            b = Fraction(-k, cs[0])
            lower = b if lower is None else max(lower, b)
    return lower


# recession cones and faces ---------------------------------------------


def _cone_rows(conj, outside):
    """Homogeneous rows of ``conj`` restricted to variables ``outside`` (others fixed at 0)."""
    idx = {v: k for k, v in enumerate(outside)}
    n = len(outside)
    rows = []

    def row(coefs, sign):
        r = [0] * n
        for v, c in coefs:
            if v in idx:
                r[idx[v]] = sign * c
        return r

    for coefs in conj.ge:
        rows.append((row(coefs, 1), 0))
    for coefs in conj.eq:
        rows.append((row(coefs, 1), 0))
        rows.append((row(coefs, -1), 0))
    for k in range(n):
        rows.append(([int(j == k) for j in range(n)], -1))
    return rows


def _piece_face_nonempty(conj, sup, J):
    if not engine.is_sat(conj):
        return False
    outside = sorted(sup - J)
    return fm.feasible(_cone_rows(conj, outside), len(outside))


def recession_witness(s, J, delta=1):
    """Integer ``u`` pointing to ``J`` with ``min_{i not in J} u_i >= delta`` and ``s + u`` inside ``s``."""
    J = frozenset(J)
    if not J <= s.support:
        return None
    conj = s.conj() if isinstance(s, BasicPresburgerSet) else None
    if conj is None or not engine.is_sat(conj):
        return None
    outside = sorted(s.support - J)
    point = fm.lexmin_point(_cone_rows(conj, outside), len(outside))
    if point is None:
        return None
    scale = lcm(*(p.denominator for p in point))
    scale *= lcm(max(int(delta), 1), *(n for n, _ in conj.dv))
    u = [INF] * s.m
    for i in s.support:
        u[i] = 0
    for v, p in zip(outside, point):
        u[v] = int(p * scale)
    return tuple(u)


def face_nonempty(s, J):
    J = frozenset(J)
    if not J <= s.support:
        return False
    return any(_piece_face_nonempty(c, s.support, J) for c in s.pieces())


def face(s, J):
    """The face ``F_J(s)`` as a ``PresburgerSet`` (empty union when the face is empty)."""
    J = frozenset(J)
    parts = []
    if J <= s.support:
        for c in s.pieces():
            if _piece_face_nonempty(c, s.support, J):
                parts.extend(engine.project(c, s.support - J))
    parts = engine.dnf_simplify(parts)
    return PresburgerSet(s.m, J, tuple(parts))


def face_as_formula(s, J):
    if not face_nonempty(s, J):
        raise EmptyFace(f"face of support {sorted(i + 1 for i in J)} is empty")
    return face(s, J).formula()


def face_supports(s):
    sup = sorted(s.support)
    out = []
    for r in range(len(sup) + 1):
        for J in combinations(sup, r):
            if face_nonempty(s, J):
                out.append(frozenset(J))
    return out


@dataclass(frozen=True)
class FaceTree:
    nodes: tuple
    edges: tuple
    is_chain: bool

    @property
    def root(self):
        return min(self.nodes, key=len) if self.nodes else None


def build_face_tree(supports):
    nodes = tuple(sorted(supports, key=lambda J: (len(J), sorted(J))))
    edges = []
    for a in nodes:
        for b in nodes:
            if a < b and not any(a < c < b for c in nodes):
                edges.append((b, a))
    chain = all(a <= b or b <= a for a in nodes for b in nodes)
    return FaceTree(nodes, tuple(edges), chain)


def face_tree(s):
    return build_face_tree(face_supports(s))


# limits ------------------------------------------------------------------


@dataclass(frozen=True)
class DivergesToInfinity:
    pass


@dataclass(frozen=True)
class FiniteFactorization:
    f_star: AffineMap


@dataclass(frozen=True)
class NotLargelyContinuous:
    pass


DIVERGES = DivergesToInfinity()
NOT_LARGELY_CONTINUOUS = NotLargelyContinuous()


@lru_cache(maxsize=None)
def affine_points(s):
    """Points of ``s`` whose affine span is the affine hull of ``s``."""
    conj = s.conj()
    model = engine.find_model(conj)
    if model is None:
        raise EmptySet("empty set has no affine hull")
    sup = sorted(s.support)
    base = [model.get(v, 0) for v in sup]
    pts = [base]
    while True:
        diffs = [[p[k] - base[k] for k in range(len(sup))] for p in pts[1:]]
        normals = nullspace(diffs, len(sup))
        found = None
        for h in normals:
            den = lcm(*(x.denominator for x in h))
            h = [int(x * den) for x in h]
            level = sum(a * b for a, b in zip(h, base))
            coefs = tuple((v, c) for v, c in zip(sup, h) if c)
            for sign in (1, -1):
                c = conj.copy()
                if c.add_ge(engine._scale(coefs, sign), -sign * level - 1):
                    m = engine.find_model(c)
                    if m is not None:
                        found = [m.get(v, 0) for v in sup]
                        break
            if found:
                break
        if found is None:
            break
        pts.append(found)
    return tuple(tuple(INF if i not in s.support else p[sup.index(i)] for i in range(s.m))
                 for p in pts)


def limit_behavior(s, J, f):
    """Behaviour of ``f`` near the face ``F_J(s)`` (assumed nonempty)."""
    J = frozenset(J)
    if f.infinite:
        return DIVERGES
    if J == s.support:
        return FiniteFactorization(f.with_domain(J))
    pts = affine_points(s)
    js = sorted(J)
    a = [[1] + [p[j] for j in js] for p in pts]
    b = [Fraction(f(p)) for p in pts]
    sol = solve(a, b)
    if sol is not None:
        return FiniteFactorization(AffineMap.make(J, sol[0], dict(zip(js, sol[1:]))))
    if not face_nonempty(s, J):
        raise EmptyFace("limit requested at an empty face")
    outside = sorted(s.support - J)
    rows = _cone_rows(s.conj(), outside)
    rows.append(([-f.coeff(v) for v in outside], 0))
    return NOT_LARGELY_CONTINUOUS if fm.feasible(rows, len(outside)) else DIVERGES


def _threshold_holds(conj, sup, J, f, g, alpha, beta):
    """True when no point has min_{i not in J} x_i >= beta + alpha*sum(x_J) and f < g."""
    c = conj.copy()
    base = tuple((j, -alpha) for j in sorted(J) if alpha)
    for i in sorted(sup - J):
        if not c.add_ge(tuple(sorted(base + ((i, 1),))), -beta):
            return True
    den = lcm(f.denominator(), g.denominator())
    diff = (g.with_domain(sup) - f).scale(den)
    coefs = tuple((v, int(x)) for v, x in diff.coeffs)
    if not c.add_ge(coefs, int(diff.const) - 1):
        return True
    return not engine.is_sat(c)


def skolem_threshold(s, J, f, g):
    """Integrally affine ``eta`` on ``F_J(s)`` with: ``Delta_J(x) >= eta(pi_J x)`` implies ``f(x) >= g(pi_J x)``.

    ``eta`` has the form ``beta + alpha * sum_{j in J} y_j``; each candidate is
    checked exactly, and ``beta`` is minimised for the first admissible ``alpha``.
    """
    J = frozenset(J)
    if not isinstance(limit_behavior(s, J, f), DivergesToInfinity):
        raise NoThreshold("f does not tend to +inf at the face")
    if g.infinite:
        raise NoThreshold("g must be finite on the face")
    conj = s.conj()
    for k in range(64):
        beta = 2 ** k - 1
        for alpha in [0] + [2 ** i for i in range(k + 1)]:
            if _threshold_holds(conj, s.support, J, f, g, alpha, beta):
                lo, hi = -1, beta
                while hi - lo > 1:
                    mid = (lo + hi) // 2
                    if _threshold_holds(conj, s.support, J, f, g, alpha, mid):
                        hi = mid
                    else:
                        lo = mid
                return AffineMap.coordinate_sum(J, hi, alpha)
    raise NoThreshold("threshold search exhausted")
