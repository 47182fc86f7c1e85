"""Affine bounds on precells: domination, pushdown to the socle, minorization."""
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor

from .core import AffineMap
from .errors import InfinitePiece, NotDivergent
from .precell import is_closed, proper_faces, to_basic
from .presburger.sets import BasicPresburgerSet, DivergesToInfinity, limit_behavior, minimum


@dataclass(frozen=True)
class PiecewiseAffineMap:
    """Affine maps on pairwise disjoint basic Presburger domains."""

    pieces: tuple

    @classmethod
    def single(cls, domain, f):
        return cls(((domain, f),))

    @classmethod
    def on_supports(cls, m, supports, make):
        """One piece per support slice; ``make(J)`` returns the map used on support ``J``."""
        return cls(tuple((BasicPresburgerSet.universe(m, J), make(frozenset(J)))
                         for J in sorted({frozenset(J) for J in supports}, key=sorted)))

    def maps(self):
        return [f for _, f in self.pieces]

    def on_support(self, J):
        J = frozenset(J)
        return PiecewiseAffineMap(tuple((d, f) for d, f in self.pieces if d.support == J))

    def __call__(self, a):
        for domain, f in self.pieces:
            if domain.contains(a):
                return f(a)
        raise ValueError(f"no piece contains {a}")


def _maps(fs):
    out = []
    for f in fs:
        if isinstance(f, PiecewiseAffineMap):
            out.extend(f.maps())
        else:
            out.append(f)
    return out


def dominate_affine(A, fs):
    """``beta + alpha * sum_{i in I} x_i`` above every map in ``fs`` on the non-negative set ``A``."""
    sup = A.support
    alpha, beta = 1, 1
    for f in _maps(fs):
        if f.infinite:
            raise InfinitePiece("cannot dominate the constant +inf")
        for _, c in f.coeffs:
            if c > 0:
                alpha = max(alpha, floor(c) + 1)
        beta = max(beta, floor(f.const) + 1)
    return AffineMap.coordinate_sum(sup, beta, alpha)


def _diverges_on_frontier(A, f):
    X = to_basic(A)
    return all(isinstance(limit_behavior(X, F.support, f), DivergesToInfinity)
               for F in proper_faces(A))


def hat_map(A, f, check=True):
    """Push ``f`` down to the socle along the lower (or upper) boundary of ``A``."""
    t = A.m - 1
    if not A.last:
        raise ValueError("the last coordinate must be in the support")
    if check and not _diverges_on_frontier(A, f):
        raise NotDivergent(f"{f} does not tend to +inf on the frontier")
    f = f.with_domain(A.support)
    slope = f.coeff(t)
    bound = A.mu if slope >= 0 else A.nu
    if bound.infinite:
        raise NotDivergent(f"{f} decreases along unbounded fibers")
    return f.substitute(t, bound).with_domain(A.socle.support)


def lower_selector(A, x):
    """Least ``t >= mu(x)`` with ``t = rho (mod N_m)``."""
    t0 = ceil(Fraction(A.mu(x)))
    return t0 + (A.rho - t0) % A.modulus


def minorize_affine(A, fs, gamma_prime=None, check=True, simplify=True):
    """Affine ``f <= min fs`` on ``A`` with limit +inf on the frontier.

    Follows the recursive construction: shift by the minimum, push down with
    ``hat_map``, recurse on the socle, lift, then rescale so that the result
    stays above ``gamma_prime`` (``min/2`` for positive inputs, ``min - 1``
    otherwise).  With ``simplify`` the result is rounded down to a small
    denominator when that keeps the frontier limit.
    """
    g = _minorize(A, fs, gamma_prime, check)
    return _round_down(A, g) if simplify else g


_DENOMINATORS = (1, 2, 4, 8, 16, 64)


def _round_down(A, g):
    """``g`` with coefficients floored to ``1/q``; valid because coordinates are non-negative."""
    if g.infinite or g.denominator() <= _DENOMINATORS[-1]:
        return g
    for q in _DENOMINATORS:
        coeffs = {i: Fraction(floor(c * q), q) for i, c in g.coeffs}
        h = AffineMap.make(g.domain, Fraction(floor(g.const * q), q), coeffs)
        if is_closed(A) or _diverges_on_frontier(A, h):
            return h
    return g


def _minorize(A, fs, gamma_prime=None, check=True):
    sup = A.support
    fs = [f.with_domain(sup) for f in fs if not f.infinite]
    if not fs:
        return dominate_affine(A, [AffineMap.constant(sup, 0)])
    if check:
        for f in fs:
            if not _diverges_on_frontier(A, f):
                raise NotDivergent(f"{f} does not tend to +inf on the frontier")
    X = to_basic(A)
    gamma = min(minimum(f, X) for f in fs)
    if gamma_prime is None:
        gamma_prime = gamma / 2 if gamma > 0 else gamma - 1
    gamma_prime = Fraction(gamma_prime)
    if is_closed(A):
        return AffineMap.constant(sup, gamma)
    if not A.last:
        g = _minorize(A.socle, [f.with_domain(A.socle.support) for f in fs],
                      gamma_prime, check=False)
        return g.with_domain(sup)
    t = A.m - 1
    shifted = [f - gamma for f in fs]
    slopes = [f.coeff(t) for f in shifted]
    eta = -(max(abs(s) for s in slopes) * A.modulus + 1)
    hats = [hat_map(A, f, check=False) for f in shifted]
    g = _minorize(A.socle, hats, eta, check=False).with_domain(sup)
    target = max(gamma_prime - gamma, Fraction(eta))
    if A.nu.infinite:
        step = min(slopes)
        coord = AffineMap.make(sup, 0, {t: 1})
        G = g + (coord - A.mu.with_domain(sup)).scale(step)
    else:
        G = g
    return G.scale(target / eta) + gamma


__all__ = ["PiecewiseAffineMap", "dominate_affine", "hat_map", "lower_selector",
           "minorize_affine"]
