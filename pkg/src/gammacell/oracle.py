"""Independent checks on a truncated grid, next to the exact checks.

Grid checks never call the quantifier-elimination engine: membership in a
precell goes through ``precell.contains`` (plain arithmetic on the tower), and
affine maps are evaluated directly.  The exact checks use the engine.  Each
report keeps the two verdicts apart so a disagreement between them shows up as
a failure of its own.
"""
import itertools
import json
import os
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .core import INF, AffineMap, format_point
from .bounding import PiecewiseAffineMap
from .errors import BudgetExceeded, Unbounded
from .precell import (
    Precell, check_complex, contains, disjoint, faces, facets, find_equal, is_closed,
    is_monohedral, to_basic, validate,
)
from .presburger.sets import (
    BasicPresburgerSet, PresburgerSet, is_empty, minimum, recession_witness, set_equal,
)
from .presburger.sets import contains as set_contains
from .presburger.sets import face as set_face
from .division import pullback

DEFAULT_BUDGET = 10 ** 6


def budget():
    return int(os.environ.get("GAMMACELL_BUDGET", DEFAULT_BUDGET))


@dataclass(frozen=True)
class BoxSpec:
    m: int
    B: int
    include_infinity: bool = True

    def __post_init__(self):
        if self.B < 1:
            raise ValueError("the box bound must be at least 1")

    @property
    def size(self):
        return (self.B + 1 + int(self.include_infinity)) ** self.m


def require_budget(box, limit=None):
    limit = budget() if limit is None else limit
    if box.size > limit:
        raise BudgetExceeded(f"{box.size} grid points exceed the budget {limit}")


def enumerate_box(box, limit=None):
    """Every point of ``([0, B] u {+inf})^m`` exactly once."""
    require_budget(box, limit)
    values = list(range(box.B + 1)) + ([INF] if box.include_infinity else [])
    return itertools.product(values, repeat=box.m)


def points_with_support(m, J, B, lo=0):
    """Grid points with finite coordinates exactly on ``J``, in ``[lo, B]``."""
    J = sorted(J)
    for vals in itertools.product(range(lo, B + 1), repeat=len(J)):
        a = [INF] * m
        for j, v in zip(J, vals):
            a[j] = v
        yield tuple(a)


def delta(J, a):
    """``min`` of the coordinates outside ``J`` (``+inf`` when there are none)."""
    return min((a[i] for i in range(len(a)) if i not in J), default=INF)


def project(J, a):
    return tuple(a[i] if i in J else INF for i in range(len(a)))


# reports -------------------------------------------------------------------------


@dataclass
class Report:
    title: str
    clauses: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def record(self, clause, witness=None):
        """Register a clause; a witness marks it violated (first 10 kept)."""
        items = self.clauses.setdefault(clause, [])
        if witness is not None and len(items) < 10:
            items.append(witness)
        if witness is not None:
            self.notes.setdefault("violations", {}).setdefault(clause, 0)
            self.notes["violations"][clause] += 1

    @property
    def ok(self):
        return all(not w for w in self.clauses.values())

    def failed(self):
        return [c for c, w in self.clauses.items() if w]

    def merge(self, other, prefix=""):
        for clause, items in other.clauses.items():
            for w in items or [None]:
                self.record(prefix + clause, w)
        return self

    def to_json(self):
        return {"title": self.title, "ok": self.ok,
                "clauses": {c: [str(w) for w in ws] for c, ws in sorted(self.clauses.items())},
                "notes": self.notes}

    def text(self):
        lines = [f"{self.title}: {'ok' if self.ok else 'VIOLATED'}"]
        for c, ws in sorted(self.clauses.items()):
            lines.append(f"  [{'FAIL' if ws else 'ok'}] {c}")
            for w in ws:
                lines.append(f"      {w}")
        return "\n".join(lines)

    def __str__(self):
        return self.text()


# faces by truncated limits ----------------------------------------------------------


def _as_basic(a):
    return to_basic(a) if isinstance(a, Precell) else a


def _member(a, point):
    if isinstance(a, Precell):
        return contains(a, point)
    return set_contains(a, point)


def check_face_by_limits(A, J, box, delta_max=None):
    """Compare the computed face of support ``J`` with a truncated limit search.

    A grid point ``b`` of support ``J`` is accepted by the grid when some
    ``a`` in ``A`` with coordinates up to ``2B`` has ``pi_J(a) = b`` and
    ``Delta_J(a) >= delta_max``, and a recession vector towards ``J`` exists
    (so that ``a + k u`` tends to ``b``).  Acceptance by the grid while the
    computed face rejects ``b`` is a violation; the converse is counted as
    inconclusive when no witness fits in the enlarged box.
    """
    J = frozenset(J)
    S = _as_basic(A)
    m = S.m
    delta_max = box.B // 2 if delta_max is None else delta_max
    report = Report(f"face {sorted(j + 1 for j in J)} by limits")
    report.record("agreement")
    computed = set_face(S, J) if J <= S.support else None
    cert = recession_witness(S, J, 1) is not None if J <= S.support else False
    outside = sorted(S.support - J)
    enlarged = 2 * box.B
    inconclusive = 0
    accepted = 0
    for b in points_with_support(m, J, box.B):
        in_face = computed is not None and set_contains(computed, b)
        found = False
        if J <= S.support:
            for vals in itertools.product(range(delta_max, enlarged + 1), repeat=len(outside)):
                a = list(b)
                for i, v in zip(outside, vals):
                    a[i] = v
                if _member(A, tuple(a)):
                    found = True
                    break
        grid = found and cert
        accepted += grid
        if grid and not in_face:
            report.record("agreement", f"grid accepts {format_point(b)}, face rejects it")
        elif in_face and not found:
            inconclusive += 1
    report.notes["accepted"] = accepted
    report.notes["inconclusive"] = inconclusive
    return report


def grid_face(A, J, box):
    """Grid points of support ``J`` accepted by the truncated limit search."""
    J = frozenset(J)
    S = _as_basic(A)
    if not J <= S.support or recession_witness(S, J, 1) is None:
        return []
    outside = sorted(S.support - J)
    out = []
    for b in points_with_support(S.m, J, box.B):
        for vals in itertools.product(range(box.B // 2, 2 * box.B + 1), repeat=len(outside)):
            a = list(b)
            for i, v in zip(outside, vals):
                a[i] = v
            if _member(A, tuple(a)):
                out.append(b)
                break
    return out


# partitions and complexes ------------------------------------------------------------


def _grid_points(m, box):
    return enumerate_box(BoxSpec(m, box.B, True) if box.m != m else box)


def check_partition(cells, target, box, exact=True):
    """``cells`` pairwise disjoint with union ``target`` (a precell)."""
    cells = list(cells)
    report = Report("partition")
    for clause in ("grid cover", "grid disjoint"):
        report.record(clause)
    for a in _grid_points(target.m, box):
        hits = [k for k, c in enumerate(cells) if contains(c, a)]
        inside = contains(target, a)
        if len(hits) > 1:
            report.record("grid disjoint", f"{format_point(a)} in cells {hits}")
        if inside and not hits:
            report.record("grid cover", f"{format_point(a)} of the target is in no cell")
        if hits and not inside:
            report.record("grid cover", f"{format_point(a)} in cell {hits[0]} but not in the target")
    if exact:
        report.record("exact disjoint")
        report.record("exact cover")
        for i, j in itertools.combinations(range(len(cells)), 2):
            if cells[i].support == cells[j].support and not disjoint(cells[i], cells[j]):
                report.record("exact disjoint", f"cells {i} and {j} intersect")
        same = [c for c in cells if c.support == target.support]
        if len(same) != len(cells):
            report.record("exact cover", "some cell has a different support")
        parts = []
        for c in same:
            parts.extend(to_basic(c).pieces())
        union = PresburgerSet(target.m, target.support, tuple(parts))
        if not set_equal(union, to_basic(target)):
            report.record("exact cover", "union differs from the target")
    return report


def _same_on_grid(a, b, box):
    if a.support != b.support:
        return False
    return all(contains(a, p) == contains(b, p)
               for p in points_with_support(a.m, a.support, box.B))


def check_closed_complex(members, box, exact=True):
    """Members pairwise disjoint, every face a member, closures meeting along faces."""
    members = list(members)
    report = Report("closed complex")
    for clause in ("grid disjoint", "grid face closure"):
        report.record(clause)
    m = members[0].m if members else 0
    for a in _grid_points(m, box):
        hits = [k for k, c in enumerate(members) if contains(c, a)]
        if len(hits) > 1:
            report.record("grid disjoint", f"{format_point(a)} in members {hits}")
    for k, c in enumerate(members):
        for F in faces(c):
            if not any(_same_on_grid(F, d, box) for d in members if d.support == F.support):
                report.record("grid face closure", f"face {F} of member {k} is not a member")
    if exact:
        report.record("exact complex")
        report.record("exact face closure")
        ok, why = check_complex(members)
        if not ok:
            report.record("exact complex", why)
        for k, c in enumerate(members):
            for F in faces(c):
                if find_equal(F, members) is None:
                    report.record("exact face closure", f"face {F} of member {k} is not a member")
    return report


def check_complex_family(members, box, exact=True):
    """Members pairwise disjoint on the grid and a complex exactly (closure not required)."""
    members = list(members)
    report = Report("complex")
    report.record("grid disjoint")
    m = members[0].m if members else 0
    for a in _grid_points(m, box):
        hits = [k for k, c in enumerate(members) if contains(c, a)]
        if len(hits) > 1:
            report.record("grid disjoint", f"{format_point(a)} in members {hits}")
    if exact:
        report.record("exact complex")
        ok, why = check_complex(members)
        if not ok:
            report.record("exact complex", why)
    return report


# division certificates -----------------------------------------------------------------


def _boundary_pieces(f, J):
    """``(domain or None, map)`` pairs describing ``f`` on the face of support ``J``."""

    J = frozenset(J)
    if f is None:
        return [(None, AffineMap.constant(J, 0))]
    if isinstance(f, AffineMap):
        return [(None, f.with_domain(J))]
    if isinstance(f, PiecewiseAffineMap):
        return [(d, g) for d, g in f.pieces if d.support == J] or [(None, AffineMap.constant(J, 0))]
    return [(None, g) for g in f(J)]


def _f_value(f, J, b):
    for dom, g in _boundary_pieces(f, J):
        if dom is None or dom.contains(b):
            return g(b)
    return None


def _only_facet(c):
    fs = facets(c)
    return fs[0] if len(fs) == 1 else None


def check_division_certificate(A, D, f, cells, box, exact=True):
    """All postconditions of a monohedral division of ``A`` over the boundary complex ``D``."""
    cells, D = list(cells), list(D)
    report = Report("division certificate")
    report.merge(check_partition(cells, A, box, exact), "partition: ")
    report.merge(check_closed_complex(cells + D, box, exact), "complex: ")
    report.record("monohedral")
    for k, c in enumerate(cells):
        if not is_monohedral(c):
            report.record("monohedral", f"cell {k} has faces off a chain")
    report.record("unique facet in the boundary complex")
    report.record("every boundary member is a facet")
    report.record("grid delta bound")
    if exact:
        report.record("exact delta bound")
    owners = {i: [] for i in range(len(D))}
    for k, c in enumerate(cells):
        if is_closed(c):
            continue
        F = _only_facet(c)
        i = None if F is None else find_equal(F, D)
        if i is None:
            report.record("unique facet in the boundary complex",
                          f"cell {k} does not have a unique facet from the boundary complex")
            continue
        owners[i].append(k)
    report.notes["boundary members shared by several cells"] = sum(
        len(ks) > 1 for ks in owners.values())
    for i, d in enumerate(D):
        if not owners[i]:
            report.record("every boundary member is a facet", f"boundary member {i} is no cell's facet")
        for k in owners[i]:
            _check_delta(report, cells[k], d, i, f, box, exact)
    return report


def _check_delta(report, c, d, i, f, box, exact):
    J = d.support
    outside = sorted(c.support - J)
    for a in points_with_support(c.m, c.support, box.B):
        if not contains(c, a):
            continue
        b = project(J, a)
        fb = _f_value(f, J, b)
        if fb is not None and delta(J, a) < fb:
            report.record("grid delta bound", f"{format_point(a)}: Delta={delta(J, a)} < f={fb}")
    if exact:
        for dom, g in _boundary_pieces(f, J):
            S = to_basic(c) if dom is None else pullback(to_basic(c), dom)
            if is_empty(S):
                continue
            for k in outside:
                gap = AffineMap.make(c.support, 0, {k: 1}) - g.with_domain(c.support)
                try:
                    low = minimum(gap, S)
                except Unbounded:
                    low = "-inf"
                if low == "-inf" or low < 0:
                    report.record("exact delta bound",
                                  f"cell over member {i}: x{k + 1} - f reaches {low}")


# corpus ----------------------------------------------------------------------------------


def _random_map(rng, dom, lo, hi, half=False):
    coeffs = {}
    for i in sorted(dom):
        if rng.random() < 0.35:
            continue
        c = rng.randint(lo, hi)
        if c:
            coeffs[i] = Fraction(c, 2) if half and rng.random() < 0.2 else c
    return AffineMap.make(dom, rng.randint(0, 3), coeffs)


def random_precell(rng, m, max_modulus=3):
    """A random tower; may be invalid (the caller filters with ``validate``)."""
    cell = Precell.dim0()
    for _ in range(m):
        dom = cell.support
        n = rng.randint(1, max_modulus)
        if rng.random() < 0.08:
            cell = Precell.at_infinity(cell, n)
            continue
        mu = _random_map(rng, dom, -1, 3, half=True)
        if rng.random() < 0.4:
            nu = AffineMap.infinity(dom)
        else:
            extra = _random_map(rng, dom, 0, 3)
            nu = mu + extra + (n - 1)
        cell = Precell.over(cell, mu, nu, rng.randrange(n), n)
    return cell


def fan_precell(rng, max_modulus=3):
    """Three-dimensional tower: unbounded second fibre, third fibre driven by ``x1`` alone.

    Dividing such a tower reaches the branch where the chosen facet keeps the
    last coordinate while the fibre above it is unbounded.
    """
    cell = Precell.dim0()
    n = rng.randint(1, max_modulus)
    cell = Precell.over(cell, AffineMap.constant(frozenset(), rng.randint(0, 3)),
                        AffineMap.infinity(frozenset()), rng.randrange(n), n)
    n = rng.randint(1, max_modulus)
    cell = Precell.over(cell, AffineMap.make(cell.support, rng.randint(0, 3)),
                        AffineMap.infinity(cell.support), rng.randrange(n), n)
    n = rng.randint(1, max_modulus)
    dom = cell.support
    mu = AffineMap.make(dom, rng.randint(0, 3), {0: rng.randint(1, 3)})
    if rng.random() < 0.3:
        nu = AffineMap.infinity(dom)
    else:
        nu = mu + AffineMap.make(dom, n - 1 + rng.randint(0, 3), {0: rng.randint(1, 3)})
    return Precell.over(cell, mu, nu, rng.randrange(n), n)


def generate_corpus(count=200, seed=0, max_m=3, max_modulus=3, fan_rate=0.08):
    """Seeded list of validated precells with ``m <= max_m``, coefficients within 3.

    A fraction ``fan_rate`` of the three-dimensional draws come from ``fan_precell``.
    """
    rng = random.Random(seed)
    out, seen = [], set()
    while len(out) < count:
        m = rng.choice([k for k in (1, 2, 2, 3, 3, 3) if k <= max_m])
        if m == 3 and rng.random() < fan_rate:
            cell = fan_precell(rng, max_modulus)
        else:
            cell = random_precell(rng, m, max_modulus)
        key = str(cell)
        if key in seen:
            continue
        if validate(cell).ok:
            seen.add(key)
            out.append(cell)
    return out


def random_basic_set(rng, m, max_coef=3, max_rows=3, max_modulus=3):
    """A random basic set inside the non-negative orthant of a random support."""
    sup = frozenset(i for i in range(m) if rng.random() < 0.8) or frozenset({0})
    idx = sorted(sup)
    ineqs = [(tuple(int(i == j) for j in range(m)), 0) for i in idx]
    for _ in range(rng.randint(0, max_rows)):
        row = [0] * m
        for i in idx:
            row[i] = rng.randint(-max_coef, max_coef)
        ineqs.append((tuple(row), rng.randint(-max_coef, max_coef)))
    congs = []
    if rng.random() < 0.5:
        n = rng.randint(2, max_modulus)
        row = [0] * m
        for i in idx:
            row[i] = rng.randint(0, max_coef)
        if any(row):
            congs.append((tuple(row), rng.randrange(n), n))
    return BasicPresburgerSet(m, sup, tuple(ineqs), tuple(congs))


def generate_basic_sets(count=100, seed=0, max_m=3):
    """Seeded nonempty random basic sets."""
    rng = random.Random(seed)
    out = []
    while len(out) < count:
        s = random_basic_set(rng, rng.randint(1, max_m))
        if not is_empty(s):
            out.append(s)
    return out


def report_json(reports):
    return json.dumps([r.to_json() for r in reports], indent=2, sort_keys=True)


__all__ = [
    "BoxSpec", "Report", "enumerate_box", "points_with_support", "check_face_by_limits",
    "grid_face", "require_budget", "check_partition", "check_closed_complex", "check_complex_family",
    "check_division_certificate", "generate_corpus", "generate_basic_sets", "random_precell",
    "fan_precell", "random_basic_set", "report_json", "budget", "delta", "project",
]
