"""Fourier-Motzkin elimination over the rationals.

A system is a list of rows ``(coefs, const)`` meaning ``coefs . u + const >= 0``.
Used for recession cones, where the dimensions are tiny.
"""
from fractions import Fraction
from math import gcd

from ..core import lcm


def _normalise(coefs, const):
    vals = list(coefs) + [const]
    d = lcm(*(Fraction(v).denominator for v in vals))
    ints = [int(Fraction(v) * d) for v in vals]
    g = 0
    for v in ints:
        g = gcd(g, v)
    g = g or 1
    ints = [v // g for v in ints]
    return tuple(ints[:-1]), ints[-1]


def _clean(rows):
    """Dedupe rows; returns None when a constant row is violated."""
    best = {}
    for coefs, const in rows:
        coefs, const = _normalise(coefs, const)
        if not any(coefs):
            if const < 0:
                return None
            continue
        old = best.get(coefs)
        if old is None or const < old:
            best[coefs] = const
    return list(best.items())


def _eliminate(rows, k):
    pos = [r for r in rows if r[0][k] > 0]
    neg = [r for r in rows if r[0][k] < 0]
    out = [r for r in rows if r[0][k] == 0]
    for pc, pk in pos:
        a = pc[k]
        for nc, nk in neg:
            b = -nc[k]
            coefs = tuple(b * x + a * y for x, y in zip(pc, nc))
            out.append((coefs, b * pk + a * nk))
    return _clean(out)


def stages(rows, n):
    """Systems after eliminating variables n-1, n-2, ...; ``None`` if infeasible."""
    cur = _clean(rows)
    if cur is None:
        return None
    out = [cur]
    for k in range(n - 1, -1, -1):
        cur = _eliminate(cur, k)
        if cur is None:
            return None
        out.append(cur)
    out.reverse()
    return out


def feasible(rows, n):
    return stages(rows, n) is not None


def lexmin_point(rows, n):
    """Feasible rational point choosing each coordinate as small as allowed, in order.

    Coordinates unbounded below take the value 0 (or their upper bound if negative).
    """
    sys = stages(rows, n)
    if sys is None:
        return None
    values = []
    for k in range(n):
        lo, hi = None, None
        for coefs, const in sys[k + 1]:
            c = coefs[k]
            if c == 0:
                continue
            rest = const + sum(coefs[i] * values[i] for i in range(k))
            bound = Fraction(-rest, c)
            if c > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if lo is not None:
            v = lo
        elif hi is not None:
            v = min(Fraction(0), hi)
        else:
            v = Fraction(0)
        values.append(v)
    return values
