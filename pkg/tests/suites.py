"""Corpus-wide checks behind the acceptance run.

Every suite returns a ``Tally``: how many assertions ran, the failures, and the
cases where the exact (QE) route and the grid route gave different answers.
"""
import itertools
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction

from gammacell import division
from gammacell.bounding import dominate_affine, hat_map, lower_selector, minorize_affine
from gammacell.core import INF, AffineMap
from gammacell.division import (
    boundary_complex, coordinate_sum_boundary, monohedral_decomposition, monohedral_division,
    split_monohedral,
)
from gammacell.oracle import (
    BoxSpec, check_closed_complex, check_division_certificate, check_face_by_limits,
    check_partition, generate_basic_sets, generate_corpus, grid_face, points_with_support,
)
from gammacell.padic import (
    PAdicContext, PAdicPolytope, ValuationPiecewiseMap, in_DMR, monotopic_division,
    polytope_contains, pval, sample_point, w_inequality_violations,
)
from gammacell.precell import (
    contains, equal, faces, is_closed, is_monohedral, proper_faces, to_basic, tower,
)
from gammacell.presburger import engine
from gammacell.presburger.formula import cong, conjunction, var
from gammacell.presburger.formula import set_equal as formula_equal
from gammacell.presburger.sets import (
    DivergesToInfinity, FiniteFactorization, contains as set_contains, face as set_face,
    face_as_formula, face_supports, limit_behavior, minimum, set_equal,
)

from helpers import aff, bset, even_lift, thin_slab, grid, sup

BOX = {1: 12, 2: 10, 3: 5}


@dataclass
class Tally:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)
    disagreements: list = field(default_factory=list)
    notes: dict = field(default_factory=dict)
    seconds: float = 0.0

    def check(self, ok, what):
        self.checks += 1
        if not ok and len(self.failures) < 20:
            self.failures.append(what)
        return ok

    def both(self, exact, on_grid, what):
        """One assertion answered by both routes: both must hold, and they must agree."""
        self.check(exact and on_grid, what)
        if exact != on_grid:
            self.disagreements.append(f"{what}: exact={exact} grid={on_grid}")

    def agree(self, exact, on_grid, what):
        """A yes/no question answered by both routes: the answers must match."""
        self.check(exact == on_grid, what)
        if exact != on_grid:
            self.disagreements.append(f"{what}: exact={exact} grid={on_grid}")

    @property
    def ok(self):
        return not self.failures and not self.disagreements


def timed(fn):
    def run(*args, **kwargs):
        t0 = time.perf_counter()
        tally = fn(*args, **kwargs)
        tally.seconds = time.perf_counter() - t0
        return tally
    run.__name__ = fn.__name__
    return run


def _report_routes(tally, report, label):
    """Pair ``exact X`` / ``grid X`` clauses of an oracle report."""
    clauses = report.clauses
    seen = set()
    for name, witnesses in clauses.items():
        prefix, _, rest = name.rpartition(": ")
        base = rest.split(" ", 1)
        if base[0] in ("exact", "grid") and len(base) == 2:
            other = f"{prefix + ': ' if prefix else ''}{'grid' if base[0] == 'exact' else 'exact'} {base[1]}"
            key = (prefix, base[1])
            if other in clauses and key not in seen:
                seen.add(key)
                ex = not clauses[name if base[0] == "exact" else other]
                gr = not clauses[other if base[0] == "exact" else name]
                tally.both(ex, gr, f"{label} {prefix} {base[1]}".strip())
                continue
            if key in seen:
                continue
        tally.check(not witnesses, f"{label} {name}: {witnesses[:2]}")


# 1-3: worked examples -------------------------------------------------------------------


@timed
def example_faces():
    t = Tally("four faces of the three-variable example")
    A = even_lift()
    sups = set(face_supports(A))
    t.check(sups == {sup(1, 2, 3), sup(1), sup(3), frozenset()}, f"supports {sups}")
    F1, F3 = bset(3, (1,), "x1 >= 0"), bset(3, (3,), "x3 >= 0", "x3 ≡ 0 [2]")
    box = BoxSpec(3, 12)
    for J, target in ((sup(1), F1), (sup(3), F3)):
        exact = set_equal(set_face(A, J), target)
        accepted = set(grid_face(A, J, box))
        expected = {b for b in points_with_support(3, J, 12) if set_contains(target, b)}
        t.both(exact, accepted == expected, f"face {sorted(J)}")
    for r in range(8):
        J = frozenset(i for i in range(3) if r >> i & 1)
        report = check_face_by_limits(A, J, box)
        t.agree(J in sups, bool(grid_face(A, J, box)), f"nonempty {sorted(J)}")
        t.check(report.ok, f"limits {sorted(J)}")
    return t


@timed
def example_congruence_face():
    t = Tally("facet formula with two residues")
    A = thin_slab()
    x1 = var(0)
    target = conjunction(x1.ge(0), cong(x1, 0, 3) | cong(x1, 2, 3))
    exact = formula_equal(face_as_formula(A, sup(1)), target)
    accepted = {b[0] for b in grid_face(A, sup(1), BoxSpec(3, 12))}
    t.both(exact, accepted == {k for k in range(13) if k % 3 != 1}, "face {1}")
    return t


@timed
def example_limit():
    t = Tally("finite limit x3/2")
    A = even_lift()
    r = limit_behavior(A, sup(3), aff("x2 - x1", (1, 2, 3)))
    exact = (isinstance(r, FiniteFactorization) and r.f_star.coeff_dict() == {2: Fraction(1, 2)}
             and r.f_star.const == 0)
    # along the ray (0, k, 2k) + (0, 0, 2j): x2 - x1 equals x3/2 on every point
    on_grid = all(Fraction(a[2], 2) == a[1] - a[0] for a in grid(3, 12, inf=False) if set_contains(A, a))
    t.both(exact, on_grid, "f* = x3/2")
    return t


# 4: faces on the corpus -----------------------------------------------------------------


@timed
def face_suite(count=200, seed=0):
    t = Tally("faces are projections")
    corpus = generate_corpus(count // 2, seed=seed)
    sets = generate_basic_sets(count - len(corpus), seed=seed)
    objects = [(str(A), to_basic(A), A) for A in corpus] + [(str(S), S, None) for S in sets]
    for label, S, A in objects:
        sups = face_supports(S)
        if A is not None:
            t.check({F.support for F in faces(A)} == set(sups), f"{label}: precell faces")
            for F in faces(A):
                t.check(set_equal(to_basic(F), set_face(S, F.support)), f"{label}: face {F.support}")
        for H in sups:
            for J in sups:
                t.check(H & J in sups, f"{label}: intersection {sorted(H)} {sorted(J)}")
                if H <= J:
                    t.check(set_equal(set_face(set_face(S, J), H), set_face(S, H)),
                            f"{label}: face of face {sorted(H)} < {sorted(J)}")
        box = BoxSpec(S.m, {1: 12, 2: 8, 3: 4}[S.m])
        for r in range(1 << S.m):
            J = frozenset(i for i in range(S.m) if r >> i & 1)
            report = check_face_by_limits(S, J, box)
            # nonemptiness: QE answer against the truncated limit search; a face whose
            # points all lie beyond the box is inconclusive on the grid, not a disagreement
            on_grid = bool(grid_face(S, J, box))
            exact = J in sups
            if on_grid or not exact:
                t.agree(exact, on_grid, f"{label}: nonempty {sorted(J)}")
            else:
                t.notes["inconclusive faces"] = t.notes.get("inconclusive faces", 0) + 1
            t.check(report.ok, f"{label}: limits {sorted(J)}")
    t.notes["objects"] = len(objects)
    return t


# 5: bounding ----------------------------------------------------------------------------


def _box_points(A, B):
    return [a for a in points_with_support(A.m, A.support, B) if contains(A, a)]


def _divergent_maps(rng, A):
    """Maps with positive coefficients on the whole support: they diverge at every face."""
    dom = A.support
    out = []
    for _ in range(2):
        coeffs = {i: Fraction(rng.randint(1, 6), rng.choice([1, 1, 2])) for i in dom}
        out.append(AffineMap.make(dom, rng.randint(-4, 6), coeffs))
    return out


@timed
def bounding_suite(count=200, seed=0):
    t = Tally("domination, pushdown, minorization")
    rng = random.Random(seed)
    corpus = generate_corpus(count, seed=seed)
    for A in corpus:
        label = str(A)
        pts = _box_points(A, BOX[A.m] // 2 + 1)
        X = to_basic(A)
        fs = _divergent_maps(rng, A)
        mixed = fs + [AffineMap.make(A.support, rng.randint(-3, 3),
                                     {i: rng.randint(-3, 3) for i in A.support})]
        d = dominate_affine(X, mixed)
        t.check(d.integral and all(c >= 1 for _, c in d.coeffs), f"{label}: dominator shape")
        t.check(all(d(a) >= g(a) for a in pts for g in mixed), f"{label}: domination")
        if is_closed(A):
            continue
        for F in proper_faces(A):
            t.check(isinstance(limit_behavior(X, F.support, d), DivergesToInfinity),
                    f"{label}: dominator diverges at {sorted(F.support)}")
        if A.last:
            for f in fs:
                h = hat_map(A, f)
                low = minimum(f, X) - abs(f.coeff(A.m - 1)) * A.modulus
                ok = all(low <= h(a[:-1]) <= f(a) for a in pts)
                t.check(ok, f"{label}: sandwich for {f}")
                for a in pts[:5]:
                    s = lower_selector(A, a[:-1])
                    t.check(contains(A, a[:-1] + (s,)) and s <= a[-1], f"{label}: selector")
        g = minorize_affine(A, fs)
        t.check(all(g(a) <= min(f(a) for f in fs) for a in pts), f"{label}: minorant below")
        if all(minimum(f, X) > 0 for f in fs):
            t.check(minimum(g, X) > 0, f"{label}: minorant positive")
        for F in proper_faces(A):
            t.check(isinstance(limit_behavior(X, F.support, g), DivergesToInfinity),
                    f"{label}: minorant diverges at {sorted(F.support)}")
    return t


# 6: division ----------------------------------------------------------------------------


def _boundary_map(A, kind, D):
    if kind == "zero":
        return None
    return coordinate_sum_boundary(A.m, {d.support for d in D})


@timed
def division_suite(count=200, seed=0, kinds=("zero", "sum"), floor=10):
    t = Tally("monohedral division")
    corpus = generate_corpus(count, seed=seed)
    cells_total = 0
    for kind in kinds:
        for key in division.CASE_COUNTS:
            division.CASE_COUNTS[key] = 0
        for A in corpus:
            D = list(boundary_complex(A))
            f = _boundary_map(A, kind, D)
            cells = list(monohedral_division(A, f, D))
            cells_total += len(cells)
            report = check_division_certificate(A, D, f, cells, BoxSpec(A.m, BOX[A.m]))
            _report_routes(t, report, f"[{kind}] {A}:")
        counts = dict(division.CASE_COUNTS)
        t.notes[f"case counts, f={kind}"] = counts
        for case in ("1", "2", "3.1", "3.2"):
            hits = counts.get(case, 0)
            t.check(hits >= floor, f"f={kind}: case {case} reached {hits} < {floor} times")
    t.notes["cells"] = cells_total
    return t


# 7: decomposition and splitting ---------------------------------------------------------


def _check_decomposition(t, A, label):
    members = list(monohedral_decomposition(A))
    box = BoxSpec(A.m, BOX[A.m])
    _report_routes(t, check_closed_complex(members, box), f"{label} complex:")
    t.check(all(is_monohedral(c) for c in members), f"{label}: monohedral")
    for F in faces(A):
        part = [c for c in members if c.support == F.support]
        _report_routes(t, check_partition(part, F, box), f"{label} cover {sorted(F.support)}:")
    t.check(all(any(c.support == F.support for F in faces(A)) for c in members),
            f"{label}: members inside the closure")
    return members


def _check_split(t, A, n, label):
    _, parts = split_monohedral(A, n)
    t.check(len(parts) == n, f"{label}: {len(parts)} parts")
    box = BoxSpec(A.m, BOX[A.m])
    _report_routes(t, check_partition(parts, A, box), f"{label} split {n}:")
    boundary = proper_faces(A)
    for P in parts:
        pf = proper_faces(P)
        same = len(pf) == len(boundary) and all(any(equal(F, G) for G in boundary) for F in pf)
        grid_same = all(
            any(contains(G, b) for G in boundary) == any(contains(F, b) for F in pf)
            for b in grid(A.m, BOX[A.m]) if frozenset(i for i, v in enumerate(b) if v is not INF) != A.support)
        t.both(same, grid_same, f"{label}: frontier kept by split {n}")


@timed
def decomposition_suite(count=200, seed=0, split_every=4):
    t = Tally("decomposition and splitting")
    _check_decomposition(t, tower([(0,), (0,)]), "N^2")
    corpus = generate_corpus(count, seed=seed)
    splits = 0
    for k, A in enumerate(corpus):
        members = _check_decomposition(t, A, str(A))
        if k % split_every:
            continue
        for c in members:
            if c.support == A.support and not is_closed(c):
                for n in (1, 2, 3, 4):
                    _check_split(t, c, n, str(c))
                    splits += 1
                break
    t.notes["splits"] = splits
    return t


# 8: p-adic transfer ---------------------------------------------------------------------


def _valuation_by_division(x, p):
    """Independent route: strip factors of p from numerator and denominator."""
    if x == 0:
        return INF
    num, den, k = abs(x.numerator), x.denominator, 0
    while num % p == 0:
        num //= p
        k += 1
    while den % p == 0:
        den //= p
        k -= 1
    return k


def _in_dmr_by_definition(x, p, M):
    """``x = 0`` or ``x = p^k (1 + p^M r)`` with ``k >= 0`` and ``r`` p-integral."""
    if x == 0:
        return True
    k = _valuation_by_division(x, p)
    if k < 0:
        return False
    r = (x / Fraction(p) ** k - 1) / Fraction(p) ** M
    return r.denominator % p != 0


def _random_rational(rng, p, a, M):
    """Mix of points built to land inside and random noise around them."""
    if a is INF:
        return Fraction(0)
    choice = rng.random()
    unit = Fraction(1 + p ** M * rng.randint(-5, 5), 1 + p ** M * rng.randint(0, 4))
    if choice < 0.5:
        return Fraction(p) ** a * unit
    if choice < 0.8:
        return Fraction(p) ** (a + rng.choice([-1, 0, 1])) * Fraction(rng.randint(-30, 30), rng.randint(1, 30))
    return Fraction(rng.randint(-200, 200), rng.randint(1, 50))


def _value_cells():
    out = [tower([(0,), (aff("x1", (1,), 2),)]), tower([(0,), (0,)]),
           tower([(1, INF, 1), (0, aff("2*x1 + 1", (1,), 2))], N=[2, 1])]
    out += [A for A in generate_corpus(30, seed=5, max_m=2) if A.m == 2][:3]
    return out


@timed
def padic_suite(points=500, samples=200, seed=0):
    t = Tally("p-adic membership and monotopic division")
    rng = random.Random(seed)
    cells = _value_cells()
    pools = []
    for A in cells:
        everything = list(itertools.product(list(range(5)) + [INF], repeat=A.m))
        pools.append(([a for a in everything if contains(A, a)], everything))
    w_checked = 0
    for p in (2, 3, 5):
        for M in (1, 2):
            ctx = PAdicContext(p, M)
            members = 0
            for k in range(points):
                A = cells[k % len(cells)]
                S = PAdicPolytope(ctx, A)
                pool = pools[k % len(cells)]
                a = rng.choice(pool[0] if rng.random() < 0.6 else pool[1])
                x = tuple(_random_rational(rng, p, ai, M) for ai in a)
                v = tuple(_valuation_by_division(xi, p) for xi in x)
                definitional = all(_in_dmr_by_definition(xi, p, M) for xi in x) and set_contains(to_basic(A), v)
                got = polytope_contains(S, x)
                members += got
                t.check(got == definitional, f"p={p} M={M} x={x}")
                t.check(all(pval(xi, ctx) == vi for xi, vi in zip(x, v)), f"valuation {x}")
                t.check(all(in_DMR(xi, ctx) == _in_dmr_by_definition(xi, p, M) for xi in x), f"D^M R {x}")
            t.notes[f"members p={p} M={M}"] = members
            # witnesses p^a realise every value-cell point
            for A in cells[:3]:
                S = PAdicPolytope(ctx, A)
                for a in points_with_support(A.m, A.support, 4):
                    if contains(A, a):
                        t.check(polytope_contains(S, tuple(Fraction(p) ** ai for ai in a)), f"witness {a}")
            S = PAdicPolytope(ctx, tower([(0,), (0,)]))
            for eps in _eps_maps():
                result = monotopic_division(S, eps)
                checked, bad = w_inequality_violations(result, eps, rng, samples)
                w_checked += checked
                t.check(checked == samples and not bad, f"p={p} M={M} w-inequality {bad[:2]}")
                cells_ = [u.value_cell for u in result.U]
                D = [T.value_cell for T in result.T]
                report = check_division_certificate(S.value_cell, D, result.g, cells_, BoxSpec(2, 8))
                _report_routes(t, report, f"p={p} M={M} value division:")
                for u in result.U:
                    pts = [a for a in points_with_support(2, u.support, 4) if contains(u.value_cell, a)]
                    for a in pts[:4]:
                        x = sample_point(u, a, rng)
                        t.check(polytope_contains(u, x) and polytope_contains(S, x), f"sample {x}")
    t.notes["w-inequality points"] = w_checked
    return t


def _eps_maps():
    zero = ValuationPiecewiseMap.zero(2, [sup(1), sup(2), frozenset()])
    first = ValuationPiecewiseMap.from_maps(2, {
        sup(1): aff("x1", (1,), 2), sup(2): AffineMap.constant(sup(2), 0),
        frozenset(): AffineMap.constant(frozenset(), 0)}, caps={sup(1): 1})
    both = ValuationPiecewiseMap.from_maps(2, {
        sup(1): aff("2*x1 + 1", (1,), 2), sup(2): aff("x2", (2,), 2),
        frozenset(): AffineMap.constant(frozenset(), 0)}, caps={sup(2): 2})
    return [zero, first, both]


# 9: engine against brute force --------------------------------------------------------


def _holds(atoms, p):
    for kind, coefs, k, n in atoms:
        val = sum(c * p[v] for v, c in coefs) + k
        if (kind == "ge" and val < 0) or (kind == "eq" and val != 0) or (kind == "dv" and val % n):
            return False
    return True


@timed
def engine_cross_check(trials=1500, seed=1, tallies=()):
    """Satisfiability and models against exhaustive search, plus the route agreement of 1-8."""
    t = Tally("exact and grid routes agree")
    rng = random.Random(seed)
    for _ in range(trials):
        n = rng.randint(1, 3)
        atoms = []
        for _ in range(rng.randint(1, 5)):
            coefs = tuple((v, c) for v, c in ((v, rng.randint(-9, 9)) for v in range(n)) if c)
            if coefs:
                atoms.append((rng.choice(["ge", "ge", "ge", "eq", "dv"]), coefs,
                              rng.randint(-25, 25), rng.randint(2, 6)))
        box = [("ge", ((v, s),), 10, 0) for v in range(n) for s in (1, -1)]
        c = engine.Conj()
        ok = all([c.add_atom(a) for a in atoms + box])
        exact = ok and engine.is_sat(c)
        brute = any(_holds(atoms, p) for p in itertools.product(range(-10, 11), repeat=n))
        t.agree(exact, brute, f"satisfiable {atoms}")
        if exact:
            model = engine.find_model(c)
            t.check(_holds(atoms, [model.get(v, 0) for v in range(n)]), f"model {atoms}")
    for other in tallies:
        t.checks += 1
        for d in other.disagreements:
            t.disagreements.append(f"[{other.name}] {d}")
    t.notes["suites compared"] = len(tallies)
    return t


SUITES = [
    ("1", "four faces of the three-variable example", example_faces),
    ("2", "facet formula with two residues", example_congruence_face),
    ("3", "finite limit x3/2 at the support {3} face", example_limit),
    ("4", "faces equal projections on the corpus", face_suite),
    ("5", "domination, pushdown and minorization", bounding_suite),
    ("6", "monohedral division certificates", division_suite),
    ("7", "decomposition and splitting", decomposition_suite),
    ("8", "p-adic membership and w-inequality", padic_suite),
    ("9", "exact and grid routes agree everywhere", engine_cross_check),
]

__all__ = ["SUITES", "Tally", "bounding_suite", "decomposition_suite", "division_suite",
           "engine_cross_check", "example_congruence_face", "example_faces", "example_limit", "face_suite", "padic_suite"]
