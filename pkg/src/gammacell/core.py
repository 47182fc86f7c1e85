"""Exact values in Q u {+inf}, points of Gamma^m and affine maps.

Points are plain tuples whose entries are ``int`` or the singleton ``INF``.
Coordinates are 0-based everywhere in the code; the text forms produced by
``format_point`` and ``AffineMap.__str__`` are 1-based.
"""
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd

from .errors import DomainMismatch, NonRestrictable


class PlusInfinity:
    """The point at infinity. Compares above every rational."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (PlusInfinity, ())

    def __hash__(self):
        return hash("gammacell.INF")

    def __eq__(self, other):
        return other is self

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True

    def __add__(self, other):
        return self

    __radd__ = __add__

    def __sub__(self, other):
        if other is self:
            raise ArithmeticError("+inf - +inf is undefined")
        return self

    def __rsub__(self, other):
        raise ArithmeticError("x - +inf would be -inf, which is not representable")

    def __neg__(self):
        raise ArithmeticError("-inf is not representable")

    def __mul__(self, other):
        if other > 0:
            return self
        raise ArithmeticError("+inf can only be scaled by a positive factor")

    __rmul__ = __mul__


INF = PlusInfinity()


def is_inf(x):
    return x is INF


def as_value(x):
    """Normalise ints, Fractions and INF into canonical extended values."""
    if x is INF:
        return INF
    q = Fraction(x)
    return int(q) if q.denominator == 1 else q


def format_value(x):
    if x is INF:
        return "inf"
    q = Fraction(x)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def parse_value(text):
    text = str(text).strip()
    if text in ("inf", "+inf"):
        return INF
    return as_value(Fraction(text))


def make_point(coords):
    pt = []
    for c in coords:
        if c is INF or c in ("inf", "+inf"):
            pt.append(INF)
            continue
        q = Fraction(c)
        if q.denominator != 1:
            raise ValueError(f"point coordinate {c} is not an integer")
        pt.append(int(q))
    return tuple(pt)


def format_point(a):
    return "(" + ", ".join(format_value(x) for x in a) + ")"


def support(a):
    return frozenset(i for i, x in enumerate(a) if x is not INF)


def delta(J, a):
    """Smallest coordinate outside ``J`` (``INF`` when every index is in ``J``)."""
    vals = [x for i, x in enumerate(a) if i not in J]
    return min(vals, default=INF)


def project(J, a):
    return tuple(x if i in J else INF for i, x in enumerate(a))


def is_nonnegative(a):
    return all(x is INF or x >= 0 for x in a)


def lcm(*values):
    return reduce(lambda x, y: x * y // gcd(x, y), values, 1)


@dataclass(frozen=True)
class AffineMap:
    """``const + sum coeffs[i] * x_i`` over a domain support, or the constant +inf.

    Only nonzero coefficients are stored, sorted by index.
    """

    domain: frozenset
    const: Fraction = Fraction(0)
    coeffs: tuple = ()
    infinite: bool = False

    @classmethod
    def make(cls, domain, const=0, coeffs=None):
        domain = frozenset(domain)
        items = []
        for i, c in sorted((coeffs or {}).items()):
            c = Fraction(c)
            if c == 0:
                continue
            if i not in domain:
                raise ValueError(f"coefficient on x{i + 1} outside the domain support")
            items.append((i, c))
        return cls(domain, Fraction(const), tuple(items), False)

    @classmethod
    def infinity(cls, domain=()):
        return cls(frozenset(domain), Fraction(0), (), True)

    @classmethod
    def constant(cls, domain, value):
        if value is INF:
            return cls.infinity(domain)
        return cls.make(domain, value)

    @classmethod
    def coordinate_sum(cls, domain, const=0, scale=1):
        return cls.make(domain, const, {i: scale for i in domain})

    def coeff(self, i):
        for j, c in self.coeffs:
            if j == i:
                return c
        return Fraction(0)

    def coeff_dict(self):
        return dict(self.coeffs)

    @property
    def integral(self):
        if self.infinite:
            return True
        return self.const.denominator == 1 and all(c.denominator == 1 for _, c in self.coeffs)

    @property
    def linear(self):
        return not self.infinite and self.const == 0

    def denominator(self):
        """Least positive n such that n*self is integrally affine."""
        if self.infinite:
            return 1
        return lcm(self.const.denominator, *(c.denominator for _, c in self.coeffs))

    def __call__(self, a):
        if self.infinite:
            return INF
        total = self.const
        for i in self.domain:
            if a[i] is INF:
                raise DomainMismatch(f"x{i + 1} is +inf at {format_point(a)}")
        for i, c in self.coeffs:
            total += c * a[i]
        return as_value(total)

    def __add__(self, other):
        if not isinstance(other, AffineMap):
            other = AffineMap.constant(self.domain, other)
        domain = self.domain | other.domain
        if self.infinite or other.infinite:
            return AffineMap.infinity(domain)
        coeffs = self.coeff_dict()
        for i, c in other.coeffs:
            coeffs[i] = coeffs.get(i, 0) + c
        return AffineMap.make(domain, self.const + other.const, coeffs)

    __radd__ = __add__

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        if not isinstance(other, AffineMap):
            return self + (-Fraction(other))
        return self + other.scale(-1)

    def scale(self, k):
        k = Fraction(k)
        if self.infinite:
            if k > 0:
                return self
            raise ArithmeticError("+inf can only be scaled by a positive factor")
        return AffineMap.make(self.domain, self.const * k, {i: c * k for i, c in self.coeffs})

    def __mul__(self, k):
        return self.scale(k)

    __rmul__ = __mul__

    def restrict(self, domain):
        """Same map on a smaller domain support; dropped coefficients must vanish."""
        domain = frozenset(domain)
        if self.infinite:
            return AffineMap.infinity(domain)
        for i, c in self.coeffs:
            if i not in domain:
                raise NonRestrictable(f"coefficient {c} on x{i + 1} would be dropped")
        return AffineMap(domain, self.const, self.coeffs, False)

    def extend(self, domain):
        """Compose with the projection from a larger domain support."""
        domain = frozenset(domain)
        if not self.domain <= domain:
            raise NonRestrictable("extension domain must contain the current one")
        return AffineMap(domain, self.const, self.coeffs, self.infinite)

    def with_domain(self, domain):
        """Restrict or extend, whichever the new domain calls for."""
        domain = frozenset(domain)
        if self.infinite:
            return AffineMap.infinity(domain)
        if any(i not in domain for i, _ in self.coeffs):
            raise NonRestrictable("a nonzero coefficient falls outside the new domain")
        return AffineMap(domain, self.const, self.coeffs, False)

    def substitute(self, i, other):
        """Replace ``x_i`` by the affine map ``other``; the result lives on ``other``'s variables."""
        if self.infinite:
            return AffineMap.infinity((self.domain - {i}) | other.domain)
        c = self.coeff(i)
        rest = AffineMap.make(self.domain - {i}, self.const,
                              {j: v for j, v in self.coeffs if j != i})
        if c == 0:
            return rest.extend(rest.domain | other.domain)
        return rest + other.scale(c)

    def __str__(self):
        if self.infinite:
            return "inf"
        return format_linear(self.const, self.coeffs)


def format_linear(const, coeffs, name="x"):
    parts = []
    for i, c in coeffs:
        mag = abs(c)
        term = f"{name}{i + 1}" if mag == 1 else f"{format_value(mag)}*{name}{i + 1}"
        parts.append(("-" if c < 0 else "+", term))
    if const != 0 or not parts:
        parts.append(("-" if const < 0 else "+", format_value(abs(const))))
    text = " ".join(f"{s} {t}" for s, t in parts)
    return text[2:] if text.startswith("+ ") else "-" + text[2:]


def eval_affine(f, a):
    return f(a)


def affine_add(f, g):
    return f + g


def affine_scale(f, k):
    return f.scale(k)


def affine_compose_with_projection(f, domain):
    return f.with_domain(domain)

