"""JSON scene files: named precells, sets, complexes and boundary maps.

Affine maps and constraints are written as text such as ``"1/2*x1 + 3"`` or
``"x2 >= x1"``; ``"inf"`` stands for +inf.  Coordinates are ``x1 .. xm``.

    {"version": 1, "m": 2, "N": [1, 1], "padic": {"p": 3, "M": 1},
     "precells": {"A": [{"mu": "0"}, {"mu": "x1", "nu": "2*x1", "rho": 0, "N": 2}]},
     "sets": {"E": {"support": [1, 2], "constraints": ["x1 >= 0", "x2 >= x1"]}},
     "complexes": {"D": ["A"]},
     "maps": {"f": {"kind": "coordinate_sum", "scale": 1}},
     "divisions": {...}}

A level of a precell is an object, or ``"inf"`` for a coordinate fixed at +inf.
"""
import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .bounding import PiecewiseAffineMap
from .core import AffineMap, lcm
from .errors import SceneError
from .padic import PAdicContext, ValuationPiece, ValuationPiecewiseMap
from .precell import Precell, validate
from .presburger.formula import atom_to_text
from .presburger.sets import BasicPresburgerSet

VERSION = 1

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>x\d+)|(?P<inf>\+?inf)|(?P<op>>=|<=|==|=|≡|[-+*/\[\]()%])|(?P<word>mod))")


def _tokens(text, where):
    out, pos = [], 0
    text = str(text)
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            col = pos + len(text[pos:]) - len(text[pos:].lstrip()) + 1
            raise SceneError(f"{where}: column {col}: unexpected character {text[col - 1]!r}")
        kind = m.lastgroup
        start = m.start(kind) + 1
        out.append((kind, m.group(kind), start))
        pos = m.end()
    out.append(("end", "", len(text) + 1))
    return out


class _Parser:
    def __init__(self, text, where, m):
        self.toks = _tokens(text, where)
        self.i = 0
        self.where = where
        self.m = m

    def peek(self):
        return self.toks[self.i]

    def take(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def fail(self, msg, tok=None):
        tok = tok or self.peek()
        raise SceneError(f"{self.where}: column {tok[2]}: {msg}")

    def expect(self, value):
        tok = self.take()
        if tok[1] != value:
            self.fail(f"expected {value!r}, found {tok[1] or 'end of text'!r}", tok)

    def number(self):
        tok = self.take()
        if tok[0] != "num":
            self.fail("expected a number", tok)
        value = Fraction(int(tok[1]))
        if self.peek()[1] == "/" and self.toks[self.i + 1][0] == "num":
            self.take()
            den = int(self.take()[1])
            if den == 0:
                self.fail("division by zero", tok)
            value /= den
        return value

    def expr(self):
        """Linear expression: returns ``(const, {index: coeff})``."""
        const, coeffs = Fraction(0), {}
        sign = 1
        if self.peek()[1] in ("+", "-"):
            sign = -1 if self.take()[1] == "-" else 1
        while True:
            c, idx = self.term()
            if idx is None:
                const += sign * c
            else:
                coeffs[idx] = coeffs.get(idx, 0) + sign * c
            nxt = self.peek()[1]
            if nxt in ("+", "-"):
                sign = -1 if self.take()[1] == "-" else 1
            else:
                break
        return const, {i: c for i, c in coeffs.items() if c}

    def term(self):
        coeff, idx = Fraction(1), None
        while True:
            tok = self.peek()
            if tok[0] == "num":
                coeff *= self.number()
            elif tok[0] == "var":
                self.take()
                if idx is not None:
                    self.fail("products of variables are not linear", tok)
                idx = int(tok[1][1:]) - 1
                if not 0 <= idx < self.m:
                    self.fail(f"variable {tok[1]} outside x1..x{self.m}", tok)
            elif tok[1] == "(":
                self.fail("parentheses are not supported", tok)
            else:
                self.fail(f"expected a number or variable, found {tok[1] or 'end of text'!r}", tok)
            if self.peek()[1] == "*":
                self.take()
                continue
            return coeff, idx

    def done(self):
        if self.peek()[0] != "end":
            self.fail(f"unexpected {self.peek()[1]!r}")


def parse_affine(text, domain, m, where="map"):
    """Parse ``"inf"`` or a linear expression into an ``AffineMap`` on ``domain``."""
    domain = frozenset(domain)
    if str(text).strip() in ("inf", "+inf"):
        return AffineMap.infinity(domain)
    p = _Parser(text, where, m)
    const, coeffs = p.expr()
    p.done()
    outside = sorted(i + 1 for i in coeffs if i not in domain)
    if outside:
        raise SceneError(f"{where}: uses x{outside[0]}, which is not a finite coordinate here")
    return AffineMap.make(domain, const, coeffs)


def _integral(const, coeffs):
    d = lcm(const.denominator, *(c.denominator for c in coeffs.values()))
    return tuple(sorted((i, int(c * d)) for i, c in coeffs.items())), int(const * d), d


def parse_constraint(text, m, where="constraint"):
    """Atoms (engine tuples) for ``a <= b``, ``a >= b <= c``, ``a = b``, ``a ≡ r [n]``, ``a = r mod n``."""
    p = _Parser(text, where, m)
    sides = [p.expr()]
    ops = []
    while p.peek()[1] in (">=", "<=", "=", "==", "≡"):
        op = p.take()[1]
        if op == "≡" or (op in ("=", "==") and _has_mod(p)):
            rhs = p.number()
            if p.peek()[1] == "[":
                p.take()
                n = p.number()
                p.expect("]")
            else:
                tok = p.take()
                if tok[1] not in ("mod", "%"):
                    p.fail("expected '[n]' or 'mod n' after a congruence", tok)
                n = p.number()
            p.done()
            if len(sides) != 1 or ops:
                p.fail("a congruence cannot be chained")
            const, coeffs = sides[0]
            if n.denominator != 1 or n < 1 or rhs.denominator != 1:
                raise SceneError(f"{where}: congruences need integer residues and moduli")
            coefs, k, d = _integral(const - rhs, coeffs)
            if d != 1:
                raise SceneError(f"{where}: congruences need integer coefficients")
            return [("dv", coefs, k, int(n))]
        ops.append(op)
        sides.append(p.expr())
    p.done()
    if not ops:
        p.fail("expected a comparison")
    atoms = []
    for op, (c1, f1), (c2, f2) in zip(ops, sides, sides[1:]):
        diff = dict(f1)
        for i, c in f2.items():
            diff[i] = diff.get(i, 0) - c
        diff = {i: c for i, c in diff.items() if c}
        coefs, k, _ = _integral(c1 - c2, diff)
        if op == ">=":
            atoms.append(("ge", coefs, k, 0))
        elif op == "<=":
            atoms.append(("ge", tuple((i, -c) for i, c in coefs), -k, 0))
        else:
            atoms.append(("eq", coefs, k, 0))
    return atoms


def _has_mod(p):
    return any(t[1] in ("mod", "%") for t in p.toks[p.i:])


# scene ---------------------------------------------------------------------------------


@dataclass
class Scene:
    m: int
    N: tuple = ()
    precells: dict = field(default_factory=dict)
    sets: dict = field(default_factory=dict)
    complexes: dict = field(default_factory=dict)
    maps: dict = field(default_factory=dict)
    padic: PAdicContext | None = None
    divisions: dict = field(default_factory=dict)
    version: int = VERSION

    def precell(self, name):
        if name not in self.precells:
            raise SceneError(f"unknown precell {name!r}")
        return self.precells[name]

    def complex(self, name):
        if name not in self.complexes:
            raise SceneError(f"unknown complex {name!r}")
        return [self.precell(n) for n in self.complexes[name]]

    def map_spec(self, name):
        if name not in self.maps:
            raise SceneError(f"unknown map {name!r}")
        return self.maps[name]

    def object(self, name):
        if name in self.precells:
            return self.precells[name]
        if name in self.sets:
            return self.sets[name]
        raise SceneError(f"unknown object {name!r}")

    def add_precell(self, name, cell):
        self.precells[name] = cell
        return name


def _require(obj, key, where, kind=None):
    if key not in obj:
        raise SceneError(f"{where}: missing {key!r}")
    value = obj[key]
    if kind is not None and not isinstance(value, kind):
        raise SceneError(f"{where}.{key}: expected {kind.__name__}")
    return value


def _int(value, where, low=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise SceneError(f"{where}: expected an integer")
    if low is not None and value < low:
        raise SceneError(f"{where}: must be at least {low}")
    return value


def _parse_precell(levels, m, N, where):
    if not isinstance(levels, list):
        raise SceneError(f"{where}: expected a list of levels")
    if len(levels) != m:
        raise SceneError(f"{where}: has {len(levels)} levels, the scene has m = {m}")
    cell = Precell.dim0()
    for k, lvl in enumerate(levels):
        here = f"{where}[{k}]"
        n = N[k] if N else 1
        if lvl in ("inf", None):
            cell = Precell.at_infinity(cell, n)
            continue
        if isinstance(lvl, dict) and lvl.get("inf") is True:
            cell = Precell.at_infinity(cell, _int(lvl.get("N", n), here + ".N", 1))
            continue
        if not isinstance(lvl, dict):
            raise SceneError(f"{here}: expected an object or \"inf\"")
        unknown = set(lvl) - {"mu", "nu", "rho", "N"}
        if unknown:
            raise SceneError(f"{here}: unknown key {sorted(unknown)[0]!r}")
        n = _int(lvl.get("N", n), here + ".N", 1)
        dom = cell.support
        mu = parse_affine(lvl.get("mu", "0"), dom, m, here + ".mu")
        nu = parse_affine(lvl.get("nu", "inf"), dom, m, here + ".nu")
        rho = _int(lvl.get("rho", 0), here + ".rho")
        cell = Precell(cell, mu, nu, rho % n, n, True)
    return cell


def _parse_set(obj, m, where):
    if not isinstance(obj, dict):
        raise SceneError(f"{where}: expected an object")
    sup = _require(obj, "support", where, list)
    for i in sup:
        _int(i, where + ".support", 1)
        if i > m:
            raise SceneError(f"{where}.support: index {i} exceeds m = {m}")
    support = frozenset(i - 1 for i in sup)
    atoms = []
    for k, text in enumerate(obj.get("constraints", [])):
        here = f"{where}.constraints[{k}]"
        for atom in parse_constraint(text, m, here):
            bad = sorted(v + 1 for v, _ in atom[1] if v not in support)
            if bad:
                raise SceneError(f"{here}: x{bad[0]} is outside the support")
            atoms.append(atom)
    return BasicPresburgerSet.from_atoms(m, support, atoms)


_MAP_KINDS = ("zero", "coordinate_sum", "pieces")


def _check_map(obj, m, where):
    if not isinstance(obj, dict):
        raise SceneError(f"{where}: expected an object")
    kind = obj.get("kind", "pieces")
    if kind not in _MAP_KINDS:
        raise SceneError(f"{where}.kind: expected one of {', '.join(_MAP_KINDS)}")
    out = {"kind": kind}
    if kind == "coordinate_sum":
        out["scale"] = obj.get("scale", 1)
        _int(out["scale"], where + ".scale", 0)
    if kind == "pieces":
        pieces = []
        for k, pc in enumerate(_require(obj, "pieces", where, list)):
            here = f"{where}.pieces[{k}]"
            J = frozenset(i - 1 for i in _require(pc, "support", here, list))
            if any(not 0 <= i < m for i in J):
                raise SceneError(f"{here}.support: index outside 1..{m}")
            f = parse_affine(_require(pc, "map", here), J, m, here + ".map")
            where_set = _parse_set({"support": sorted(i + 1 for i in J),
                                    "constraints": pc.get("where", [])}, m, here)
            pieces.append((where_set, f, _int(pc.get("cap", 0), here + ".cap", 0),
                           list(pc.get("where", []))))
        out["pieces"] = pieces
    return out


def parse_scene(data, strict=True):
    """Build a ``Scene`` from decoded JSON; ``strict`` also validates every precell."""
    if not isinstance(data, dict):
        raise SceneError("scene: expected a JSON object")
    version = data.get("version", VERSION)
    if version != VERSION:
        raise SceneError(f"scene: unsupported version {version}")
    m = _int(_require(data, "m", "scene"), "scene.m", 0)
    N = tuple(_int(n, "scene.N", 1) for n in data.get("N", [1] * m))
    if len(N) != m:
        raise SceneError(f"scene.N: has {len(N)} entries, expected {m}")
    scene = Scene(m=m, N=N)
    if data.get("padic") is not None:
        pd = data["padic"]
        try:
            scene.padic = PAdicContext(_int(_require(pd, "p", "scene.padic"), "scene.padic.p", 2),
                                       _int(pd.get("M", 1), "scene.padic.M", 1))
        except ValueError as exc:
            raise SceneError(f"scene.padic: {exc}") from None
    for name, levels in data.get("precells", {}).items():
        scene.precells[name] = _parse_precell(levels, m, N, f"precells.{name}")
    for name, obj in data.get("sets", {}).items():
        scene.sets[name] = _parse_set(obj, m, f"sets.{name}")
    for name, members in data.get("complexes", {}).items():
        if not isinstance(members, list):
            raise SceneError(f"complexes.{name}: expected a list of precell names")
        for n in members:
            if n not in scene.precells:
                raise SceneError(f"complexes.{name}: unknown precell {n!r}")
        scene.complexes[name] = list(members)
    for name, obj in data.get("maps", {}).items():
        scene.maps[name] = _check_map(obj, m, f"maps.{name}")
    for name, rec in data.get("divisions", {}).items():
        where = f"divisions.{name}"
        if not isinstance(rec, dict):
            raise SceneError(f"{where}: expected an object")
        for key in ("A", "boundary", "cells"):
            _require(rec, key, where, str)
        if rec["A"] not in scene.precells:
            raise SceneError(f"{where}.A: unknown precell {rec['A']!r}")
        for key in ("boundary", "cells"):
            if rec[key] not in scene.complexes:
                raise SceneError(f"{where}.{key}: unknown complex {rec[key]!r}")
        if rec.get("f") is not None and rec["f"] not in scene.maps:
            raise SceneError(f"{where}.f: unknown map {rec['f']!r}")
        scene.divisions[name] = {k: rec[k] for k in ("A", "boundary", "cells", "f") if k in rec}
    if strict:
        for name, cell in scene.precells.items():
            report = validate(cell)
            if not report.ok:
                raise SceneError(f"precells.{name}: {'; '.join(report.violations)}")
    return scene


def load_scene(path, strict=True):
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise SceneError(f"{path}: {exc.strerror}") from None
    return loads(text, strict, path)


def loads(text, strict=True, source="scene"):
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SceneError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return parse_scene(data, strict)


# serialisation -----------------------------------------------------------------------


def _level_json(cell, n_default):
    if not cell.last:
        return "inf" if cell.modulus == n_default else {"inf": True, "N": cell.modulus}
    out = {"mu": str(cell.mu), "nu": str(cell.nu), "rho": cell.rho}
    if cell.modulus != n_default:
        out["N"] = cell.modulus
    return out


def precell_json(cell, N=None):
    levels = cell.levels()
    N = N or (1,) * len(levels)
    return [_level_json(lvl, n) for lvl, n in zip(levels, N)]


def set_json(s):
    c = s.conj()
    if c is None:
        constraints = ["0 >= 1"]
    else:
        constraints = [atom_to_text(*a) for a in sorted(c.atoms(), key=lambda a: (a[0], a[1], a[2], a[3]))]
    return {"support": sorted(i + 1 for i in s.support), "constraints": constraints}


def _map_json(spec):
    out = {"kind": spec["kind"]}
    if spec["kind"] == "coordinate_sum":
        out["scale"] = spec["scale"]
    if spec["kind"] == "pieces":
        out["pieces"] = [
            {"support": sorted(i + 1 for i in d.support), "map": str(f), "cap": cap, "where": where}
            for d, f, cap, where in spec["pieces"]]
    return out


def to_json(scene):
    """Canonical JSON-ready dict (sorted keys when dumped)."""
    out = {"version": scene.version, "m": scene.m, "N": list(scene.N)}
    if scene.padic is not None:
        out["padic"] = {"p": scene.padic.p, "M": scene.padic.M}
    out["precells"] = {k: precell_json(v, scene.N) for k, v in scene.precells.items()}
    out["sets"] = {k: set_json(v) for k, v in scene.sets.items()}
    out["complexes"] = {k: list(v) for k, v in scene.complexes.items()}
    out["maps"] = {k: _map_json(v) for k, v in scene.maps.items()}
    if scene.divisions:
        out["divisions"] = {k: dict(v) for k, v in scene.divisions.items()}
    return out


def dumps(scene):
    return json.dumps(to_json(scene), indent=2, sort_keys=True, ensure_ascii=False) + "\n"


# maps ---------------------------------------------------------------------------------


def boundary_map(spec, m, supports):
    """The division boundary function described by a map spec (``None`` means zero)."""
    if spec is None or spec["kind"] == "zero":
        return None
    if spec["kind"] == "coordinate_sum":
        return PiecewiseAffineMap.on_supports(
            m, supports, lambda J: AffineMap.coordinate_sum(J, 0, spec["scale"]))
    return PiecewiseAffineMap(tuple((d, f) for d, f, _, _ in spec["pieces"]))


def valuation_map(spec, m, supports):
    """``v o eps`` described by a map spec."""
    if spec is None or spec["kind"] == "zero":
        return ValuationPiecewiseMap.zero(m, supports)
    if spec["kind"] == "coordinate_sum":
        return ValuationPiecewiseMap.from_maps(
            m, {frozenset(J): AffineMap.coordinate_sum(J, 0, spec["scale"]) for J in supports})
    try:
        return ValuationPiecewiseMap(m, tuple(ValuationPiece(d, f, cap)
                                              for d, f, cap, _ in spec["pieces"]))
    except ValueError as exc:
        raise SceneError(str(exc)) from None


__all__ = [
    "Scene", "boundary_map", "dumps", "load_scene", "loads", "parse_affine", "parse_constraint",
    "parse_scene", "precell_json", "set_json", "to_json", "valuation_map",
]
