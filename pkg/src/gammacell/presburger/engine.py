"""Conjunctions of Presburger atoms and exact elimination of integer variables.

A conjunction holds three kinds of atoms over integer variables (named by ints):

* ``ge``: ``c.x + k >= 0``
* ``eq``: ``c.x + k = 0``
* ``dv``: ``n | c.x + k``

Coefficient vectors are tuples of ``(var, coef)`` pairs sorted by var with no
zero entries.  Atoms are normalised on insertion (gcd reduction, residue
reduction, opposite bounds merged into equalities) so trivially contradictory
conjunctions are detected without search.

Elimination of one variable returns a list of conjunctions whose disjunction is
equivalent to the existential projection.  It uses, in order of preference,
equality substitution, dropping one-sided bounds, exact Fourier-Motzkin when
every lower/upper pair has a unit coefficient, and Cooper's method otherwise.
"""
from math import gcd

from ..core import lcm


def _gcd_coefs(coefs):
    g = 0
    for _, c in coefs:
        g = gcd(g, c)
    return g


def _neg(coefs):
    return tuple((v, -c) for v, c in coefs)


def _scale(coefs, s):
    return tuple((v, c * s) for v, c in coefs)


def _coef_of(coefs, v):
    for w, c in coefs:
        if w == v:
            return c
    return 0


def _without(coefs, v):
    return tuple((w, c) for w, c in coefs if w != v)


def _combine(a, ca, b, cb):
    """Return ``a*ca + b*cb`` for coefficient tuples."""
    acc = {}
    for v, c in ca:
        acc[v] = acc.get(v, 0) + a * c
    for v, c in cb:
        acc[v] = acc.get(v, 0) + b * c
    return tuple(sorted((v, c) for v, c in acc.items() if c))


class Conj:
    """Normalised conjunction of atoms.  Treat as immutable once built."""

    __slots__ = ("ge", "eq", "dv", "_key")

    def __init__(self):
        self.ge = {}
        self.eq = {}
        self.dv = {}
        self._key = None

    # construction -----------------------------------------------------

    @classmethod
    def build(cls, ge=(), eq=(), dv=()):
        c = cls()
        for coefs, k in ge:
            if not c.add_ge(coefs, k):
                return None
        for coefs, k in eq:
            if not c.add_eq(coefs, k):
                return None
        for n, coefs, k in dv:
            if not c.add_dv(n, coefs, k):
                return None
        return c

    def copy(self):
        c = Conj()
        c.ge = dict(self.ge)
        c.eq = dict(self.eq)
        c.dv = dict(self.dv)
        return c

    def add_ge(self, coefs, k):
        self._key = None
        if not coefs:
            return k >= 0
        g = _gcd_coefs(coefs)
        g = abs(g)
        if g != 1:
            coefs = tuple((v, c // g) for v, c in coefs)
            k = k // g
        if coefs in self.eq:
            return k - self.eq[coefs] >= 0
        neg = _neg(coefs)
        if neg in self.eq:
            return k + self.eq[neg] >= 0
        if neg in self.ge:
            s = k + self.ge[neg]
            if s < 0:
                return False
            if s == 0:
                del self.ge[neg]
                return self.add_eq(coefs, k)
        old = self.ge.get(coefs)
        if old is None or k < old:
            self.ge[coefs] = k
        return True

    def add_eq(self, coefs, k):
        self._key = None
        if not coefs:
            return k == 0
        g = abs(_gcd_coefs(coefs))
        if k % g:
            return False
        if g != 1:
            coefs = tuple((v, c // g) for v, c in coefs)
            k //= g
        if coefs[0][1] < 0:
            coefs, k = _neg(coefs), -k
        if coefs in self.eq:
            return self.eq[coefs] == k
        neg = _neg(coefs)
        if coefs in self.ge:
            if self.ge.pop(coefs) - k < 0:
                return False
        if neg in self.ge:
            if self.ge.pop(neg) + k < 0:
                return False
        self.eq[coefs] = k
        return True

    def add_dv(self, n, coefs, k):
        self._key = None
        n = abs(n)
        if n == 1:
            return True
        coefs = tuple((v, c % n) for v, c in coefs if c % n)
        k %= n
        if not coefs:
            return k == 0
        g = gcd(n, _gcd_coefs(coefs))
        if g != 1:
            if k % g:
                return False
            n //= g
            coefs = tuple((v, c // g) for v, c in coefs)
            k //= g
            if n == 1:
                return True
        lead = coefs[0][1]
        if lead != 1 and gcd(lead, n) == 1:
            inv = pow(lead, -1, n)
            coefs = tuple((v, c * inv % n) for v, c in coefs)
            k = k * inv % n
        key = (n, coefs)
        if key in self.dv:
            return self.dv[key] == k
        self.dv[key] = k
        return True

    def add_atom(self, atom):
        kind, coefs, k, n = atom
        if kind == "ge":
            return self.add_ge(coefs, k)
        if kind == "eq":
            return self.add_eq(coefs, k)
        return self.add_dv(n, coefs, k)

    # inspection -------------------------------------------------------

    def atoms(self):
        out = [("eq", c, k, 0) for c, k in self.eq.items()]
        out += [("ge", c, k, 0) for c, k in self.ge.items()]
        out += [("dv", c, k, n) for (n, c), k in self.dv.items()]
        return out

    def key(self):
        if self._key is None:
            self._key = (frozenset(self.ge.items()), frozenset(self.eq.items()),
                         frozenset(self.dv.items()))
        return self._key

    def __hash__(self):
        return hash(self.key())

    def __eq__(self, other):
        return isinstance(other, Conj) and self.key() == other.key()

    def variables(self):
        vs = set()
        for coefs in self.ge:
            vs.update(v for v, _ in coefs)
        for coefs in self.eq:
            vs.update(v for v, _ in coefs)
        for _, coefs in self.dv:
            vs.update(v for v, _ in coefs)
        return vs

    def is_true(self):
        return not (self.ge or self.eq or self.dv)

    def holds(self, assign):
        for coefs, k in self.ge.items():
            if sum(c * assign[v] for v, c in coefs) + k < 0:
                return False
        for coefs, k in self.eq.items():
            if sum(c * assign[v] for v, c in coefs) + k != 0:
                return False
        for (n, coefs), k in self.dv.items():
            if (sum(c * assign[v] for v, c in coefs) + k) % n:
                return False
        return True

    def __repr__(self):
        from .formula import conj_to_text
        return f"Conj({conj_to_text(self)})"

    # transformation ---------------------------------------------------

    def conjoin(self, other):
        c = self.copy()
        for atom in other.atoms():
            if not c.add_atom(atom):
                return None
        return c

    def substitute(self, v, coefs, k, d=1, skip=None):
        """Replace ``v`` by ``(coefs.x + k) / d`` (``d > 0``, divisibility assumed).

        ``skip`` names one atom (kind, coefs) to drop, used for the defining equality.
        """
        out = Conj()
        for kind, ac, ak, n in self.atoms():
            if skip is not None and (kind, ac) == skip:
                continue
            c = _coef_of(ac, v)
            if c == 0:
                ok = out.add_atom((kind, ac, ak, n))
            else:
                nc = _combine(d, _without(ac, v), c, coefs)
                nk = d * ak + c * k
                if kind == "ge":
                    ok = out.add_ge(nc, nk)
                elif kind == "eq":
                    ok = out.add_eq(nc, nk)
                else:
                    ok = out.add_dv(n * d, nc, nk)
            if not ok:
                return None
        return out

    def assign(self, values):
        """Substitute integer values for some variables."""
        out = Conj()
        for kind, ac, ak, n in self.atoms():
            nk = ak
            nc = []
            for w, c in ac:
                if w in values:
                    nk += c * values[w]
                else:
                    nc.append((w, c))
            if not out.add_atom((kind, tuple(nc), nk, n)):
                return None
        return out


# elimination -----------------------------------------------------------


def _classify(conj, v):
    lowers, uppers, dvs = [], [], []
    for coefs, k in conj.ge.items():
        c = _coef_of(coefs, v)
        if c > 0:
            lowers.append((coefs, k))
        elif c < 0:
            uppers.append((coefs, k))
    for (n, coefs), k in conj.dv.items():
        if _coef_of(coefs, v):
            dvs.append((n, coefs, k))
    return lowers, uppers, dvs


def _cost(conj, v):
    eq_coefs = [abs(_coef_of(c, v)) for c in conj.eq if _coef_of(c, v)]
    if eq_coefs:
        return 0 if min(eq_coefs) == 1 else 1
    lowers, uppers, dvs = _classify(conj, v)
    if not lowers or not uppers:
        if not dvs:
            return 2
        if len(dvs) == 1:
            return 3
        return 10 + lcm(*(n for n, _, _ in dvs))
    if not dvs and _exact_pairs(lowers, uppers, v):
        return 4 + len(lowers) * len(uppers)
    l_all = [abs(_coef_of(c, v)) for c, _ in lowers + uppers] + [abs(_coef_of(c, v)) for _, c, _ in dvs]
    big = lcm(*l_all)
    period = lcm(big, *(n * big // abs(_coef_of(c, v)) for n, c, _ in dvs))
    return 100 + min(len(lowers), len(uppers)) * period


def _exact_pairs(lowers, uppers, v):
    if all(_coef_of(c, v) == 1 for c, _ in lowers):
        return True
    if all(_coef_of(c, v) == -1 for c, _ in uppers):
        return True
    for lc, _ in lowers:
        a = _coef_of(lc, v)
        if a == 1:
            continue
        for uc, _ in uppers:
            if _coef_of(uc, v) != -1:
                return False
    return True


def _strip(conj, v):
    """Copy of ``conj`` without the atoms mentioning ``v``."""
    out = Conj()
    for coefs, k in conj.ge.items():
        if not _coef_of(coefs, v):
            out.ge[coefs] = k
    for coefs, k in conj.eq.items():
        if not _coef_of(coefs, v):
            out.eq[coefs] = k
    for key, k in conj.dv.items():
        if not _coef_of(key[1], v):
            out.dv[key] = k
    return out


def choose_variable(conj, candidates):
    return min(candidates, key=lambda v: (_cost(conj, v), v))


def eliminate(conj, v):
    """Disjuncts equivalent to ``exists v. conj``."""
    eqs = [(c, k) for c, k in conj.eq.items() if _coef_of(c, v)]
    if eqs:
        coefs, k = min(eqs, key=lambda e: (abs(_coef_of(e[0], v)), e[0]))
        c = _coef_of(coefs, v)
        rest = _without(coefs, v)
        if abs(c) == 1:
            # v = -c * (rest + k)
            out = conj.substitute(v, _scale(rest, -c), -c * k, 1, skip=("eq", coefs))
        else:
            s = 1 if c > 0 else -1
            out = conj.substitute(v, _scale(rest, -s), -s * k, abs(c), skip=("eq", coefs))
            if out is not None and not out.add_dv(abs(c), rest, k):
                out = None
        return [] if out is None else [out]

    lowers, uppers, dvs = _classify(conj, v)
    if not dvs:
        if not lowers or not uppers:
            return [_strip(conj, v)]
        if _exact_pairs(lowers, uppers, v):
            out = _strip(conj, v)
            for lc, lk in lowers:
                a = _coef_of(lc, v)
                for uc, uk in uppers:
                    b = -_coef_of(uc, v)
                    if not out.add_ge(_combine(b, lc, a, uc), b * lk + a * uk):
                        return []
            return [out]
    elif not lowers or not uppers:
        base = _strip(conj, v)
        if len(dvs) == 1:
            n, coefs, k = dvs[0]
            g = gcd(n, _coef_of(coefs, v))
            return [base] if base.add_dv(g, _without(coefs, v), k) else []
        period = lcm(*(n for n, _, _ in dvs))
        results = []
        for j in range(period):
            c = base.copy()
            ok = all(c.add_dv(n, _without(coefs, v), k + _coef_of(coefs, v) * j)
                     for n, coefs, k in dvs)
            if ok:
                results.append(c)
        return _dedupe(results)
    return _cooper(conj, v, lowers, uppers, dvs)


def _cooper(conj, v, lowers, uppers, dvs):
    big = lcm(*(abs(_coef_of(c, v)) for c, _ in lowers + uppers),
              *(abs(_coef_of(c, v)) for _, c, _ in dvs))
    # rescale so that v appears with coefficient +-big, then rename big*v to v
    scaled = _strip(conj, v)
    atoms = []
    for coefs, k in lowers + uppers:
        c = _coef_of(coefs, v)
        s = big // abs(c)
        atoms.append(("ge", _scale(_without(coefs, v), s), k * s, 1 if c > 0 else -1, 0))
    for n, coefs, k in dvs:
        c = _coef_of(coefs, v)
        s = big // abs(c)
        atoms.append(("dv", _scale(_without(coefs, v), s), k * s, 1 if c > 0 else -1, n * s))
    if big > 1:
        atoms.append(("dv", (), 0, 1, big))
    period = lcm(*(n for kind, _, _, _, n in atoms if kind == "dv"))
    use_lower = len(lowers) <= len(uppers)
    bounds = [(rc, rk) for kind, rc, rk, sg, _ in atoms
              if kind == "ge" and (sg > 0) == use_lower]
    results = []
    for rc, rk in bounds:
        for j in range(period):
            # lower bound v + r >= 0 gives v = -r + j; upper -v + r >= 0 gives v = r - j
            if use_lower:
                tc, tk = _scale(rc, -1), -rk + j
            else:
                tc, tk = rc, rk - j
            c = scaled.copy()
            ok = True
            for kind, ac, ak, sg, n in atoms:
                nc = _combine(1, ac, sg, tc)
                nk = ak + sg * tk
                ok = c.add_ge(nc, nk) if kind == "ge" else c.add_dv(n, nc, nk)
                if not ok:
                    break
            if ok:
                results.append(c)
    return _dedupe(results)


def _dedupe(conjs):
    seen = set()
    out = []
    for c in conjs:
        k = c.key()
        if k not in seen:
            seen.add(k)
            out.append(c)
    return out


def project(conj, variables):
    """DNF (list of Conj) equivalent to ``exists variables. conj``."""
    pending = [conj]
    done = []
    variables = set(variables)
    while pending:
        c = pending.pop()
        vs = c.variables() & variables
        if not vs:
            done.append(c)
            continue
        v = choose_variable(c, vs)
        pending.extend(eliminate(c, v))
    return _dedupe(done)


_SAT_CACHE = {}
_SAT_CACHE_LIMIT = 200000


def is_sat(conj):
    """Integer satisfiability, decided with the Omega test."""
    if conj is None:
        return False
    key = conj.key()
    hit = _SAT_CACHE.get(key)
    if hit is not None:
        return hit
    result = _omega(_absorb_divisibility(conj))
    if len(_SAT_CACHE) > _SAT_CACHE_LIMIT:
        _SAT_CACHE.clear()
    _SAT_CACHE[key] = result
    return result


def _fresh(conj):
    vs = conj.variables()
    return max(vs) + 1 if vs else 0


def _absorb_divisibility(conj):
    """Replace each ``n | e`` by ``e = n*z`` with a fresh integer ``z``."""
    if conj is None or not conj.dv:
        return conj
    out = Conj()
    out.ge = dict(conj.ge)
    out.eq = dict(conj.eq)
    z = _fresh(conj)
    for (n, coefs), k in conj.dv.items():
        if not out.add_eq(coefs + ((z, -n),), k):
            return None
        z += 1
    return out


def _mod_hat(a, m):
    return a - m * ((2 * a + m) // (2 * m))


def _drop_equality(conj):
    """Remove one equality by substitution; non-unit coefficients shrink via a new variable."""
    coefs, k = next(iter(conj.eq.items()))
    unit = [(v, c) for v, c in coefs if abs(c) == 1]
    if unit:
        v, c = unit[0]
        rest = _without(coefs, v)
        return conj.substitute(v, _scale(rest, -c), -c * k, 1, skip=("eq", coefs))
    v, a = min(coefs, key=lambda vc: (abs(vc[1]), vc[0]))
    m = abs(a) + 1
    s = 1 if a > 0 else -1
    sigma = _fresh(conj)
    # x_v = s * (sum_{i != v} mh(a_i) x_i + mh(k) - m * sigma)
    rest = tuple((w, s * _mod_hat(c, m)) for w, c in coefs if w != v) + ((sigma, -s * m),)
    return conj.substitute(v, rest, s * _mod_hat(k, m), 1)


def _omega(conj):
    if conj is None:
        return False
    key = conj.key()
    hit = _OMEGA_CACHE.get(key)
    if hit is not None:
        return hit
    result = _omega_step(conj)
    if len(_OMEGA_CACHE) > _SAT_CACHE_LIMIT:
        _OMEGA_CACHE.clear()
    _OMEGA_CACHE[key] = result
    return result


_OMEGA_CACHE = {}


def _omega_step(conj):
    if conj.eq:
        return _omega(_drop_equality(conj))
    vs = conj.variables()
    if not vs:
        return True
    best = None
    for v in sorted(vs):
        lowers, uppers, _ = _classify(conj, v)
        if not lowers or not uppers:
            return _omega(_strip(conj, v))
        exact = all(_coef_of(c, v) == 1 for c, _ in lowers) or all(
            _coef_of(c, v) == -1 for c, _ in uppers)
        splinters = min(_splinter_count(lowers, uppers, v, 1),
                        _splinter_count(uppers, lowers, v, -1))
        rank = (not exact, splinters, len(lowers) * len(uppers), v)
        if best is None or rank < best[0]:
            best = (rank, v, lowers, uppers, exact)
    _, v, lowers, uppers, exact = best
    real = _shadow(conj, v, lowers, uppers, dark=False)
    if exact:
        return _omega(real)
    if not _omega(real):
        return False
    if _omega(_shadow(conj, v, lowers, uppers, dark=True)):
        return True
    # splinters: some bound on the cheaper side is nearly tight
    if _splinter_count(lowers, uppers, v, 1) <= _splinter_count(uppers, lowers, v, -1):
        side, other, sign = lowers, uppers, 1
    else:
        side, other, sign = uppers, lowers, -1
    amax = max(sign * -_coef_of(c, v) for c, _ in other)
    for bc, bk in side:
        a = sign * _coef_of(bc, v)
        for i in range((amax * a - amax - a) // amax + 1):
            c = conj.copy()
            if c.add_eq(bc, bk - i) and _omega(c):
                return True
    return False


def _splinter_count(side, other, v, sign):
    amax = max(sign * -_coef_of(c, v) for c, _ in other)
    return sum((amax * a - amax - a) // amax + 1
               for a in (sign * _coef_of(c, v) for c, _ in side))


def _shadow(conj, v, lowers, uppers, dark):
    out = _strip(conj, v)
    for lc, lk in lowers:
        a = _coef_of(lc, v)
        for uc, uk in uppers:
            b = -_coef_of(uc, v)
            slack = (a - 1) * (b - 1) if dark else 0
            if not out.add_ge(_combine(b, lc, a, uc), b * lk + a * uk - slack):
                return None
    return out


def find_model(conj):
    """An integer assignment satisfying ``conj`` or ``None``.

    Variables are fixed one at a time to the least feasible value (searching
    upward from 0, or downward when only negative values remain).
    """
    if not is_sat(conj):
        return None
    model = {}
    cur = conj
    for v in sorted(conj.variables()):
        value = _least_value(cur, v)
        model[v] = value
        cur = cur.assign({v: value})
    return model


def _bounded(conj, v, sign, bound):
    c = conj.copy()
    # sign * v <= bound
    return c if c.add_ge(((v, -sign),), bound) else None


def _least_value(conj, v):
    if is_sat(_bounded(conj, v, -1, 0)):
        sign = 1  # search the least value >= 0
        base = conj.copy()
        base.add_ge(((v, 1),), 0)
    else:
        sign = -1  # greatest value <= -1
        base = conj.copy()
        base.add_ge(((v, -1),), -1)
    # least r >= 0 admitting a solution of v <= r (v >= 0) or -v <= r + 1 (v < 0)
    offset = 0 if sign == 1 else -1
    hi = 1
    while not is_sat(_bounded(base, v, sign, hi - offset)):
        hi *= 2
    lo = 0
    while lo < hi:
        mid = (lo + hi) // 2
        if is_sat(_bounded(base, v, sign, mid - offset)):
            hi = mid
        else:
            lo = mid + 1
    return sign * (hi - offset)


def dnf_sat(dnf):
    return any(is_sat(c) for c in dnf)


def dnf_and(a, b):
    out = []
    for x in a:
        for y in b:
            c = x.conjoin(y)
            if c is not None:
                out.append(c)
    return _dedupe(out)


def negate_atom(atom):
    kind, coefs, k, n = atom
    if kind == "ge":
        return [[("ge", _neg(coefs), -k - 1, 0)]]
    if kind == "eq":
        return [[("ge", coefs, k - 1, 0)], [("ge", _neg(coefs), -k - 1, 0)]]
    return [[("dv", coefs, k - r, n)] for r in range(1, n)]


def negate_conj(conj):
    """Disjoint DNF of the complement: not a1, a1 and not a2, ..."""
    out = []
    prefix = Conj()
    for atom in conj.atoms():
        for alt in negate_atom(atom):
            c = prefix.copy()
            if all(c.add_atom(a) for a in alt):
                out.append(c)
        if not prefix.add_atom(atom):
            break
    return out


def dnf_not(dnf, prune=True):
    acc = [Conj()]
    for conj in dnf:
        acc = dnf_and(acc, negate_conj(conj))
        if prune:
            acc = [c for c in acc if is_sat(c)]
        if not acc:
            break
    return acc


def dnf_subtract(dnf, other):
    """``dnf and not other``, pruning empty pieces after each step."""
    acc = [c for c in dnf if is_sat(c)]
    for conj in other:
        nxt = []
        for piece in acc:
            for alt in negate_conj(conj):
                c = piece.conjoin(alt)
                if c is not None and is_sat(c):
                    nxt.append(c)
        acc = _dedupe(nxt)
        if not acc:
            break
    return acc


def dnf_simplify(dnf):
    return _dedupe([c for c in dnf if is_sat(c)])
