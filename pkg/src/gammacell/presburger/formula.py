"""First-order Presburger formulas and quantifier elimination.

Variables are integers; in rendered text variable ``i`` is written ``x{i+1}``.
``qe`` returns an equivalent quantifier-free formula in disjunctive form.
"""
from dataclasses import dataclass
from fractions import Fraction
from itertools import product

from ..core import format_linear, lcm
from . import engine


class LinExpr:
    """Linear expression with rational coefficients, used to build atoms."""

    __slots__ = ("coefs", "const")

    def __init__(self, coefs=None, const=0):
        self.coefs = {v: Fraction(c) for v, c in (coefs or {}).items() if c}
        self.const = Fraction(const)

    @staticmethod
    def lift(x):
        return x if isinstance(x, LinExpr) else LinExpr({}, x)

    def __add__(self, other):
        other = LinExpr.lift(other)
        coefs = dict(self.coefs)
        for v, c in other.coefs.items():
            coefs[v] = coefs.get(v, 0) + c
        return LinExpr(coefs, self.const + other.const)

    __radd__ = __add__

    def __neg__(self):
        return self * -1

    def __sub__(self, other):
        return self + (-LinExpr.lift(other))

    def __rsub__(self, other):
        return LinExpr.lift(other) - self

    def __mul__(self, k):
        k = Fraction(k)
        return LinExpr({v: c * k for v, c in self.coefs.items()}, self.const * k)

    __rmul__ = __mul__

    def integral(self):
        """Scale to integer coefficients: returns (coef tuple, const)."""
        d = lcm(self.const.denominator, *(c.denominator for c in self.coefs.values()))
        coefs = tuple(sorted((v, int(c * d)) for v, c in self.coefs.items()))
        return coefs, int(self.const * d)

    def ge(self, other=0):
        coefs, k = (self - other).integral()
        return Atom("ge", coefs, k)

    def le(self, other=0):
        return LinExpr.lift(other).ge(self)

    def gt(self, other=0):
        # over the integers after clearing denominators, t > 0 iff t - 1 >= 0
        coefs, k = (self - other).integral()
        return Atom("ge", coefs, k - 1)

    def lt(self, other=0):
        return LinExpr.lift(other).gt(self)

    def eq(self, other=0):
        coefs, k = (self - other).integral()
        return Atom("eq", coefs, k)

    def __repr__(self):
        return f"LinExpr({format_linear(self.const, sorted(self.coefs.items()))})"


def var(i):
    return LinExpr({i: 1})


def cong(expr, residue, modulus):
    """``expr == residue (mod modulus)``; ``expr`` must have integer coefficients."""
    expr = LinExpr.lift(expr) - residue
    if expr.const.denominator != 1 or any(c.denominator != 1 for c in expr.coefs.values()):
        raise ValueError("congruence atoms need integral terms")
    coefs = tuple(sorted((v, int(c)) for v, c in expr.coefs.items()))
    return Atom("dv", coefs, int(expr.const), int(modulus))


class Formula:
    def __and__(self, other):
        return And((self, other))

    def __or__(self, other):
        return Or((self, other))

    def __invert__(self):
        return Not(self)

    def __str__(self):
        return to_text(self)


@dataclass(frozen=True)
class Truth(Formula):
    value: bool


TRUE = Truth(True)
FALSE = Truth(False)


@dataclass(frozen=True)
class Atom(Formula):
    """``ge``: term >= 0, ``eq``: term = 0, ``dv``: n divides term."""

    kind: str
    coefs: tuple
    const: int
    n: int = 0

    def as_tuple(self):
        return (self.kind, self.coefs, self.const, self.n)


@dataclass(frozen=True)
class And(Formula):
    args: tuple


@dataclass(frozen=True)
class Or(Formula):
    args: tuple


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula


@dataclass(frozen=True)
class Exists(Formula):
    variables: tuple
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    variables: tuple
    body: Formula


def conjunction(*fs):
    return And(tuple(fs))


def disjunction(*fs):
    return Or(tuple(fs))


def exists(variables, body):
    return Exists(tuple(variables), body)


def forall(variables, body):
    return Forall(tuple(variables), body)


def free_vars(f):
    if isinstance(f, Truth):
        return set()
    if isinstance(f, Atom):
        return {v for v, _ in f.coefs}
    if isinstance(f, (And, Or)):
        out = set()
        for a in f.args:
            out |= free_vars(a)
        return out
    if isinstance(f, Not):
        return free_vars(f.arg)
    return free_vars(f.body) - set(f.variables)


def to_dnf(f, positive=True):
    """List of ``Conj`` whose disjunction is equivalent to ``f`` (or its negation)."""
    if isinstance(f, Truth):
        return [engine.Conj()] if f.value == positive else []
    if isinstance(f, Atom):
        alts = [[f.as_tuple()]] if positive else engine.negate_atom(f.as_tuple())
        out = []
        for alt in alts:
            c = engine.Conj()
            if all(c.add_atom(a) for a in alt):
                out.append(c)
        return out
    if isinstance(f, Not):
        return to_dnf(f.arg, not positive)
    if isinstance(f, (And, Or)):
        is_and = isinstance(f, And) == positive
        parts = [to_dnf(a, positive) for a in f.args]
        if is_and:
            acc = [engine.Conj()]
            for p in parts:
                acc = engine.dnf_and(acc, p)
                if not acc:
                    break
            return acc
        return engine._dedupe([c for p in parts for c in p])
    if isinstance(f, Exists):
        body = to_dnf(f.body, True)
        projected = _project_all(body, f.variables)
        return projected if positive else engine.dnf_not(projected)
    if isinstance(f, Forall):
        body = to_dnf(f.body, False)
        projected = _project_all(body, f.variables)
        return engine.dnf_not(projected) if positive else projected
    raise TypeError(f"not a formula: {f!r}")


def _project_all(dnf, variables):
    out = []
    for c in dnf:
        out.extend(engine.project(c, variables))
    return engine.dnf_simplify(out)


def from_dnf(dnf):
    if not dnf:
        return FALSE
    disjuncts = []
    for c in dnf:
        atoms = tuple(Atom(*a) for a in c.atoms())
        disjuncts.append(TRUE if not atoms else atoms[0] if len(atoms) == 1 else And(atoms))
    if any(d == TRUE for d in disjuncts):
        return TRUE
    return disjuncts[0] if len(disjuncts) == 1 else Or(tuple(disjuncts))


def qe(f):
    """Quantifier-free formula equivalent to ``f`` over the integers."""
    return from_dnf(engine.dnf_simplify(to_dnf(f)))


def is_satisfiable(f):
    return engine.dnf_sat(to_dnf(f))


def set_subset(a, b):
    """Decide ``forall x (a -> b)`` for formulas over the same free variables."""
    return not is_satisfiable(And((a, Not(b))))


def set_equal(a, b):
    return set_subset(a, b) and set_subset(b, a)


def evaluate(f, assign, bound=20):
    """Truth value under ``assign``; quantifiers range over ``[-bound, bound]``.

    Only an oracle for tests: bounded quantifiers are exact when witnesses are small.
    """
    if isinstance(f, Truth):
        return f.value
    if isinstance(f, Atom):
        t = sum(c * assign[v] for v, c in f.coefs) + f.const
        if f.kind == "ge":
            return t >= 0
        if f.kind == "eq":
            return t == 0
        return t % f.n == 0
    if isinstance(f, And):
        return all(evaluate(a, assign, bound) for a in f.args)
    if isinstance(f, Or):
        return any(evaluate(a, assign, bound) for a in f.args)
    if isinstance(f, Not):
        return not evaluate(f.arg, assign, bound)
    rng = range(-bound, bound + 1)
    results = (evaluate(f.body, {**assign, **dict(zip(f.variables, vals))}, bound)
               for vals in product(rng, repeat=len(f.variables)))
    return any(results) if isinstance(f, Exists) else all(results)


# rendering ---------------------------------------------------------------


def atom_to_text(kind, coefs, k, n=0):
    if kind == "dv":
        return f"{format_linear(0, coefs)} ≡ {(-k) % n} [{n}]"
    lhs = format_linear(k, coefs)
    return f"{lhs} {'>=' if kind == 'ge' else '='} 0"


def conj_to_text(conj):
    atoms = conj.atoms()
    if not atoms:
        return "true"
    return " & ".join(atom_to_text(*a) for a in sorted(atoms, key=_atom_order))


def _atom_order(atom):
    kind, coefs, k, n = atom
    return ({"eq": 0, "ge": 1, "dv": 2}[kind], coefs, k, n)


def to_text(f):
    if isinstance(f, Truth):
        return "true" if f.value else "false"
    if isinstance(f, Atom):
        return atom_to_text(*f.as_tuple())
    if isinstance(f, And):
        return " & ".join(_wrap(a, And) for a in f.args) or "true"
    if isinstance(f, Or):
        return " | ".join(_wrap(a, Or) for a in f.args) or "false"
    if isinstance(f, Not):
        return "!" + _wrap(f.arg, Not)
    q = "exists" if isinstance(f, Exists) else "forall"
    names = ", ".join(f"x{v + 1}" for v in f.variables)
    return f"{q} {names}. ({to_text(f.body)})"


def _wrap(f, parent):
    text = to_text(f)
    if isinstance(f, (And, Or)) and not isinstance(f, parent):
        return f"({text})"
    if isinstance(f, (Exists, Forall, Not)) and parent is not Not:
        return f"({text})"
    return text


def dnf_to_text(dnf):
    if not dnf:
        return "false"
    parts = sorted(conj_to_text(c) for c in dnf)
    if len(parts) == 1:
        return parts[0]
    return " | ".join(f"({p})" if " & " in p else p for p in parts)
