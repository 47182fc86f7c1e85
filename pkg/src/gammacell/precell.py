"""Precells mod N stored as presentation towers.

A precell in Gamma^m is either the single point of Gamma^0, or a socle precell
``X`` in Gamma^{m-1} together with

* ``last=False``: the set ``X x {+inf}``, or
* ``last=True``: the points ``(x, t)`` with ``x`` in ``X``,
  ``mu(x) <= t <= nu(x)`` and ``t = rho (mod modulus)``.

The last coordinate has index ``m - 1``.  ``mu`` and ``nu`` are affine maps on the
socle's support; ``nu`` may be the constant ``+inf``.
"""
from dataclasses import dataclass, field
from functools import lru_cache

from .core import INF, AffineMap
from .errors import InvalidPrecell, Unbounded
from .presburger import engine
from .presburger.sets import (
    BasicPresburgerSet, DivergesToInfinity, FiniteFactorization, NotLargelyContinuous,
    build_face_tree, face_supports, intersects, limit_behavior, minimum, set_equal,
    set_subset,
)


@dataclass(frozen=True, repr=False)
class Precell:
    socle: "Precell | None" = None
    mu: AffineMap | None = None
    nu: AffineMap | None = None
    rho: int = 0
    modulus: int = 1
    last: bool = True

    @classmethod
    def dim0(cls):
        return cls()

    @classmethod
    def over(cls, socle, mu=0, nu=INF, rho=0, modulus=1):
        """The precell ``mu <= t <= nu, t = rho (mod modulus)`` above ``socle``."""
        dom = socle.support
        mu = mu if isinstance(mu, AffineMap) else AffineMap.constant(dom, mu)
        nu = nu if isinstance(nu, AffineMap) else AffineMap.constant(dom, nu)
        return cls(socle, mu.with_domain(dom), nu.with_domain(dom), rho % modulus, modulus, True)

    @classmethod
    def at_infinity(cls, socle, modulus=1):
        dom = socle.support
        return cls(socle, AffineMap.infinity(dom), AffineMap.infinity(dom), 0, modulus, False)

    @property
    def is_dim0(self):
        return self.socle is None

    @property
    def m(self):
        return 0 if self.socle is None else self.socle.m + 1

    @property
    def support(self):
        return _support(self)

    @property
    def N(self):
        if self.socle is None:
            return ()
        return self.socle.N + (self.modulus,)

    def levels(self):
        """Presentation levels from the first coordinate to the last."""
        out = [] if self.socle is None else self.socle.levels()
        if self.socle is not None:
            out.append(self)
        return out

    def __str__(self):
        return describe(self)

    def __repr__(self):
        return f"Precell[{describe(self)}]"


@lru_cache(maxsize=None)
def _support(a):
    if a.socle is None:
        return frozenset()
    s = a.socle.support
    return s | {a.m - 1} if a.last else s


def tower(levels, N=None):
    """Build a precell from a list of levels.

    Each level is ``None`` (coordinate +inf) or a tuple ``(mu, nu, rho)`` whose
    maps are ``AffineMap`` or numbers.
    """
    N = N or [1] * len(levels)
    cell = Precell.dim0()
    for lvl, n in zip(levels, N):
        if lvl is None:
            cell = Precell.at_infinity(cell, n)
        else:
            mu, nu, rho = (tuple(lvl) + (INF, 0)[len(lvl) - 1:])[:3]
            cell = Precell.over(cell, mu, nu, rho, n)
    return cell


# membership ----------------------------------------------------------------


def contains(a, point):
    """Direct arithmetic membership test following the presentation."""
    if len(point) != a.m:
        return False
    if a.socle is None:
        return True
    t = point[-1]
    if not contains(a.socle, point[:-1]):
        return False
    if not a.last:
        return t is INF
    if t is INF:
        return False
    x = point[:-1]
    return a.mu(x) <= t <= a.nu(x) and (t - a.rho) % a.modulus == 0


@lru_cache(maxsize=None)
def to_basic(a):
    """The same point set as a basic Presburger set (denominators cleared)."""
    m = a.m
    if a.socle is None:
        return BasicPresburgerSet(0, frozenset())
    base = to_basic(a.socle)
    ineqs = [(row + (0,), g) for row, g in base.inequalities]
    congs = [(row + (0,), r, n) for row, r, n in base.congruences]
    if a.last:
        t = m - 1
        for bound, sign in ((a.mu, 1), (a.nu, -1)):
            if bound.infinite:
                continue
            den = bound.denominator()
            row = [0] * m
            row[t] = sign * den
            for i, c in bound.coeffs:
                row[i] = -sign * int(c * den)
            ineqs.append((tuple(row), sign * int(bound.const * den)))
        if a.modulus > 1:
            congs.append((tuple(int(i == t) for i in range(m)), a.rho, a.modulus))
    conj = BasicPresburgerSet(m, a.support, tuple(ineqs), tuple(congs)).conj()
    return BasicPresburgerSet.from_conj(m, a.support, conj)


def equal(a, b):
    return a.m == b.m and a.support == b.support and set_equal(to_basic(a), to_basic(b))


def subset(a, b):
    return set_subset(to_basic(a), to_basic(b))


def disjoint(a, b):
    return not intersects(to_basic(a), to_basic(b))


# validation -------------------------------------------------------------------


@dataclass
class ValidationReport:
    violations: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.violations

    def __bool__(self):
        return self.ok


@lru_cache(maxsize=None)
def validate(a):
    report = ValidationReport()
    if a.socle is None:
        return report
    sub = validate(a.socle)
    report.violations.extend(f"socle: {v}" for v in sub.violations)
    if not sub.ok:
        return report
    dom = a.socle.support
    if a.modulus < 1:
        report.violations.append(f"modulus {a.modulus} must be positive")
        return report
    if not 0 <= a.rho < a.modulus:
        report.violations.append(f"residue {a.rho} outside [0, {a.modulus})")
    if not a.last:
        if not (a.mu.infinite and a.nu.infinite):
            report.violations.append("a +inf coordinate must have infinite boundaries")
        return report
    for name, f in (("mu", a.mu), ("nu", a.nu)):
        if f.domain != dom:
            report.violations.append(f"{name} domain {sorted(i + 1 for i in f.domain)} "
                                     f"differs from socle support {sorted(i + 1 for i in dom)}")
    if a.mu.infinite:
        report.violations.append("mu is +inf although the last coordinate is finite")
    if not report.ok:
        return report
    X = to_basic(a.socle)
    for name, f in (("mu", a.mu), ("nu", a.nu)):
        if not f.infinite and _negative_somewhere(f, X):
            report.violations.append(f"{name} = {f} takes negative values on the socle")
    if not _fibers_nonempty(a):
        report.violations.append("some socle point has an empty fiber")
    for J in face_supports(X):
        for name, f in (("mu", a.mu), ("nu", a.nu)):
            if isinstance(limit_behavior(X, J, f), NotLargelyContinuous):
                sup = "{" + ",".join(str(i + 1) for i in sorted(J)) + "}"
                report.violations.append(f"{name} = {f} is not largely continuous at the socle face {sup}")
    return report


def _negative_somewhere(f, X):
    try:
        return minimum(f, X) < 0
    except Unbounded:
        return True


def _fibers_nonempty(a):
    """No socle point whose least admissible fiber value ``s`` exceeds ``nu``."""
    if a.nu.infinite:
        return True
    t = a.m - 1

    def scaled(f):
        den = f.denominator()
        return den, [(i, int(c * den)) for i, c in f.coeffs], int(f.const * den)

    d, mu, mk = scaled(a.mu)
    e, nu, nk = scaled(a.nu)
    bad = engine.Conj()
    # d*s - mu(x) >= 0 and mu(x) - d*s + d*N - 1 >= 0 pin s to the least admissible value
    ok = bad.add_ge(tuple(sorted([(t, d)] + [(i, -c) for i, c in mu])), -mk)
    ok = ok and bad.add_ge(tuple(sorted([(t, -d)] + mu)), mk + d * a.modulus - 1)
    # e*s - nu(x) - 1 >= 0
    ok = ok and bad.add_ge(tuple(sorted([(t, e)] + [(i, -c) for i, c in nu])), -nk - 1)
    if a.modulus > 1:
        ok = ok and bad.add_dv(a.modulus, ((t, 1),), -a.rho)
    if not ok:
        return True
    for piece in to_basic(a.socle).pieces():
        c = piece.conjoin(bad)
        if c is not None and engine.is_sat(c):
            return False
    return True


def require_valid(a):
    report = validate(a)
    if not report.ok:
        raise InvalidPrecell(report)
    return a


# faces ------------------------------------------------------------------------


def extension(socle, J, f):
    """Continuous extension of ``f`` (affine on ``socle``) to the socle face of support ``J``."""
    J = frozenset(J)
    if f.infinite:
        return AffineMap.infinity(J)
    lb = limit_behavior(to_basic(socle), J, f)
    if isinstance(lb, FiniteFactorization):
        return lb.f_star
    if isinstance(lb, DivergesToInfinity):
        return AffineMap.infinity(J)
    raise InvalidPrecell(ValidationReport([f"{f} is not largely continuous at support {sorted(J)}"]))


@lru_cache(maxsize=None)
def face(a, J):
    """The face of support ``J`` as a precell, or ``None`` if it is empty."""
    J = frozenset(J)
    if not J <= a.support:
        return None
    if a.socle is None:
        return a
    t = a.m - 1
    Y = face(a.socle, J - {t})
    if Y is None:
        return None
    if not a.last:
        return Precell.at_infinity(Y, a.modulus)
    jh = J - {t}
    if t in J:
        mu_bar = extension(a.socle, jh, a.mu)
        if mu_bar.infinite:
            return None
        return Precell(Y, mu_bar, extension(a.socle, jh, a.nu), a.rho, a.modulus, True)
    if not extension(a.socle, jh, a.nu).infinite:
        return None
    return Precell.at_infinity(Y, a.modulus)


@lru_cache(maxsize=None)
def faces(a):
    """All nonempty faces, ordered by support size then support."""
    if a.socle is None:
        return (a,)
    out = []
    for Y in faces(a.socle):
        jh = Y.support
        if not a.last:
            out.append(Precell.at_infinity(Y, a.modulus))
            continue
        mu_bar = extension(a.socle, jh, a.mu)
        nu_bar = extension(a.socle, jh, a.nu)
        if not mu_bar.infinite:
            out.append(Precell(Y, mu_bar, nu_bar, a.rho, a.modulus, True))
        if nu_bar.infinite:
            out.append(Precell.at_infinity(Y, a.modulus))
    out.sort(key=lambda f: (len(f.support), sorted(f.support)))
    return tuple(out)


def proper_faces(a):
    return tuple(f for f in faces(a) if f.support != a.support)


frontier = proper_faces


def facets(a):
    proper = proper_faces(a)
    return tuple(f for f in proper if not any(f.support < g.support for g in proper))


def is_closed(a):
    return not proper_faces(a)


def is_monohedral(a):
    sups = [f.support for f in faces(a)]
    return all(x <= y or y <= x for x in sups for y in sups)


def face_tree(a):
    return build_face_tree([f.support for f in faces(a)])


def socle_face_correspondence(a):
    """Map each face ``Y`` of the socle to the faces of ``a`` whose socle is ``Y``.

    Also checks the shape rule: such a face is ``Y x {+inf}`` when the last index
    is outside its support, and otherwise its fibres are those of the closure.
    Facets of ``a`` have as socle either the socle itself or one of its facets.
    Returns a list of ``(Y, [faces])`` pairs.
    """
    if a.socle is None:
        return [(a, [a])]
    t = a.m - 1
    out = []
    for Y in faces(a.socle):
        over = [f for f in faces(a) if f.socle.support == Y.support]
        assert over, "every socle face carries a face of the precell"
        for f in over:
            assert equal(f.socle, Y)
            if t not in f.support:
                assert not f.last
        out.append((Y, over))
    socle_facets = {f.support for f in facets(a.socle)}
    for B in facets(a):
        assert B.socle.support == a.socle.support or B.socle.support in socle_facets
    return out


# complexes --------------------------------------------------------------------


@dataclass
class PrecellComplex:
    members: list

    def __iter__(self):
        return iter(self.members)

    def __len__(self):
        return len(self.members)

    @property
    def closed(self):
        return is_closed_family(self.members)


def find_equal(cell, family):
    for k, other in enumerate(family):
        if equal(cell, other):
            return k
    return None


def is_closed_family(members):
    return all(find_equal(f, members) is not None for c in members for f in faces(c))


def check_complex(members):
    """Return ``(ok, certificate)``; the certificate names the first failing pair."""
    members = list(members)
    for i, a in enumerate(members):
        report = validate(a)
        if not report.ok:
            return False, f"member {i} invalid: {report.violations}"
    for i in range(len(members)):
        for j in range(i + 1, len(members)):
            a, b = members[i], members[j]
            if a.support == b.support and not disjoint(a, b):
                return False, f"members {i} and {j} intersect"
            fa = {f.support: f for f in faces(a)}
            fb = {f.support: f for f in faces(b)}
            for J in fa.keys() & fb.keys():
                if disjoint(fa[J], fb[J]):
                    continue
                if not equal(fa[J], fb[J]):
                    sup = sorted(k + 1 for k in J)
                    return False, f"members {i} and {j}: closures meet on support {sup} outside a common face"
    return True, "complex"


# printing ---------------------------------------------------------------------


def describe(a):
    if a.socle is None:
        return "Gamma^0"
    parts = []
    for lvl in a.levels():
        k = lvl.m
        if not lvl.last:
            parts.append(f"x{k} = inf")
            continue
        hi = "" if lvl.nu.infinite else f" <= {lvl.nu}"
        cong = f", x{k} ≡ {lvl.rho} [{lvl.modulus}]" if lvl.modulus > 1 else ""
        parts.append(f"{lvl.mu} <= x{k}{hi}{cong}")
    return "; ".join(parts)


def point_in_any(point, cells):
    return [k for k, c in enumerate(cells) if contains(c, point)]


def format_support(J):
    return "{" + ",".join(str(i + 1) for i in sorted(J)) + "}"


__all__ = [
    "Precell", "PrecellComplex", "ValidationReport", "tower", "contains", "to_basic",
    "validate", "require_valid", "face", "faces", "proper_faces", "frontier", "facets",
    "is_closed", "is_monohedral", "face_tree", "socle_face_correspondence",
    "check_complex", "equal", "subset", "disjoint", "extension", "describe",
    "format_support",
]
