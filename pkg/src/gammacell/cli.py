"""Command line front end: ``gammacell <verb> <scene.json> ...``.

Exit codes: 0 ok, 1 a check found a violation, 2 usage or input error.
"""
import argparse
import json
import random
import sys
from fractions import Fraction
from itertools import combinations

from .core import INF, delta, format_point, format_value, project
from .division import (
    boundary_complex, monohedral_decomposition, monohedral_division, split_monohedral,
)
from .errors import GammacellError, SceneError
from .oracle import (
    BoxSpec, Report, check_closed_complex, check_complex_family, check_division_certificate,
    check_face_by_limits, check_partition, require_budget, _f_value, _only_facet,
)
from .padic import (
    PAdicPolytope, in_DMR, monotopic_division, polytope_contains, pval, unit_part,
    valuation_vector, w_inequality_violations,
)
from .precell import (
    Precell, check_complex, contains, equal, faces, find_equal, is_closed, is_closed_family,
    is_monohedral,
    proper_faces, to_basic, validate,
)
from .presburger.sets import build_face_tree, face as set_face, face_supports
from .render import render_svg
from .scene import boundary_map, dumps, load_scene, set_json, valuation_map

OK, VIOLATION, USAGE = 0, 1, 2


def _sup(J):
    return "{" + ",".join(str(i + 1) for i in sorted(J)) + "}"


def _emit(args, scene, report_lines):
    """Write the scene to ``-o`` (report on stdout) or to stdout (report on stderr)."""
    text = "\n".join(report_lines)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(dumps(scene))
        print(text)
    else:
        sys.stdout.write(dumps(scene))
        print(text, file=sys.stderr)


def _box(scene, args):
    B = args.box if getattr(args, "box", None) else {1: 12, 2: 10}.get(scene.m, 5)
    return BoxSpec(scene.m, B)


def _boundary(scene, A, name, prefix):
    """Members of the named boundary complex, or the refined boundary of ``A`` added to the scene."""
    if name:
        return name, scene.complex(name)
    D = list(boundary_complex(A))
    names = [scene.add_precell(f"{prefix}.d{k}", d) for k, d in enumerate(D)]
    cname = f"{prefix}.boundary"
    scene.complexes[cname] = names
    return cname, D


# verbs ----------------------------------------------------------------------------------


def cmd_validate(args):
    scene = load_scene(args.scene, strict=False)
    bad = 0
    for name, cell in scene.precells.items():
        report = validate(cell)
        print(f"precell {name}: {'ok' if report.ok else 'INVALID'}")
        for v in report.violations:
            print(f"    {v}")
        bad += not report.ok
    for name, s in scene.sets.items():
        print(f"set {name}: ok (support {_sup(s.support)})")
    for name in scene.complexes:
        members = scene.complex(name)
        ok, why = check_complex_list(members)
        print(f"complex {name}: {'ok' if ok else 'NOT A COMPLEX'}"
              f"{' (closed)' if ok and is_closed_family(members) else ''}")
        if not ok:
            print(f"    {why}")
        bad += not ok
    for name, spec in scene.maps.items():
        print(f"map {name}: {spec['kind']}")
    return VIOLATION if bad else OK


def check_complex_list(members):
    if any(not validate(c).ok for c in members):
        return False, "some member is invalid"
    return check_complex(members)


def cmd_faces(args):
    scene = load_scene(args.scene)
    obj = scene.object(args.name)
    if isinstance(obj, Precell):
        fs = faces(obj)
        supports = [F.support for F in fs]
        print(f"faces of {args.name} ({len(fs)}):")
        for F in fs:
            print(f"  {_sup(F.support)}: {F}")
    else:
        supports = face_supports(obj)
        print(f"faces of {args.name} ({len(supports)}):")
        for J in supports:
            print(f"  {_sup(J)}: {set_face(obj, J)}")
    tree = build_face_tree(supports)
    print("tree:")
    for parent, child in tree.edges:
        print(f"  {_sup(parent)} > {_sup(child)}")
    print(f"chain: {'yes' if tree.is_chain else 'no'}")
    return OK


def _sampled_delta(report, cells, D, fmap, seed, samples, B):
    """Seeded spot checks of ``Delta_J >= f o pi_J`` at points beyond the verification box."""
    rng = random.Random(seed)
    report.record("sampled delta bound")
    owners = []
    for c in cells:
        F = None if is_closed(c) else _only_facet(c)
        if F is not None and find_equal(F, D) is not None:
            owners.append((c, F.support))
    checked = 0
    for _ in range(samples if owners else 0):
        c, J = rng.choice(owners)
        a = tuple(rng.randint(0, 4 * B) if i in c.support else INF for i in range(c.m))
        if not contains(c, a):
            continue
        checked += 1
        fb = _f_value(fmap, J, project(J, a))
        if fb is not None and delta(J, a) < fb:
            report.record("sampled delta bound", f"{format_point(a)}: Delta={delta(J, a)} < f={fb}")
    report.notes["sampled points"] = checked


def cmd_divide(args):
    scene = load_scene(args.scene)
    A = scene.precell(args.A)
    bname, D = _boundary(scene, A, args.boundary, args.A)
    spec = scene.map_spec(args.f) if args.f else None
    fmap = boundary_map(spec, scene.m, {d.support for d in D})
    cells = list(monohedral_division(A, fmap, D))
    names = [scene.add_precell(f"{args.A}.c{k}", c) for k, c in enumerate(cells)]
    cname = f"{args.A}.cells"
    scene.complexes[cname] = names
    rec = {"A": args.A, "boundary": bname, "cells": cname}
    if args.f:
        rec["f"] = args.f
    scene.divisions[f"{args.A}.division"] = rec
    box = _box(scene, args)
    report = check_division_certificate(A, D, fmap, cells, box)
    _sampled_delta(report, cells, D, fmap, args.seed, args.samples, box.B)
    lines = [f"divided {args.A} into {len(cells)} cells over {len(D)} boundary members"]
    lines += [f"  {n}: {c}" for n, c in zip(names, cells)]
    lines.append(report.text())
    _emit(args, scene, lines)
    return OK if report.ok else VIOLATION


def cmd_decompose(args):
    scene = load_scene(args.scene)
    A = scene.precell(args.A)
    members = list(monohedral_decomposition(A))
    names = [scene.add_precell(f"{args.A}.m{k}", c) for k, c in enumerate(members)]
    scene.complexes[f"{args.A}.decomposition"] = names
    report = check_closed_complex(members, _box(scene, args))
    report.record("monohedral")
    for n, c in zip(names, members):
        if not is_monohedral(c):
            report.record("monohedral", f"{n} is not monohedral")
    top = [c for c in members if c.support == A.support]
    report.merge(check_partition(top, A, _box(scene, args)), "union: ")
    lines = [f"decomposed {args.A} into {len(members)} monohedral cells"]
    lines += [f"  {n}: {c}" for n, c in zip(names, members)]
    lines.append(report.text())
    _emit(args, scene, lines)
    return OK if report.ok else VIOLATION


def cmd_split(args):
    scene = load_scene(args.scene)
    A = scene.precell(args.A)
    N, cells = split_monohedral(A, args.n)
    names = [scene.add_precell(f"{args.A}.s{k}", c) for k, c in enumerate(cells)]
    scene.complexes[f"{args.A}.split"] = names
    report = check_partition(cells, A, _box(scene, args))
    report.record("same frontier")
    boundary = proper_faces(A)
    for n, c in zip(names, cells):
        pf = proper_faces(c)
        if len(pf) != len(boundary) or any(find_equal(F, boundary) is None or
                                           not equal(F, boundary[find_equal(F, boundary)])
                                           for F in pf):
            report.record("same frontier", f"{n} has a different frontier")
    lines = [f"split {args.A} into {len(cells)} cells (moduli {list(N)})"]
    lines += [f"  {n}: {c}" for n, c in zip(names, cells)]
    lines.append(report.text())
    _emit(args, scene, lines)
    return OK if report.ok else VIOLATION


def _polytope(scene, name):
    if scene.padic is None:
        raise SceneError("the scene has no \"padic\" context")
    return PAdicPolytope(scene.padic, scene.precell(name))


def _parse_point(text, m):
    try:
        pt = tuple(Fraction(t.strip()) for t in text.split(","))
    except (ValueError, ZeroDivisionError):
        raise SceneError(f"--point: cannot read {text!r} as comma-separated rationals") from None
    if len(pt) != m:
        raise SceneError(f"--point: expected {m} coordinates, got {len(pt)}")
    return pt


def cmd_padic_member(args):
    scene = load_scene(args.scene)
    S = _polytope(scene, args.S)
    ctx = S.ctx
    x = _parse_point(args.point, S.m)
    print(f"p = {ctx.p}, M = {ctx.M}")
    for i, xi in enumerate(x):
        v = pval(xi, ctx)
        u = "-" if xi == 0 else format_value(unit_part(xi, ctx))
        print(f"  x{i + 1} = {format_value(xi)}: v = {format_value(v)}, unit part {u}, "
              f"in D^{ctx.M}R: {'yes' if in_DMR(xi, ctx) else 'no'}")
    a = valuation_vector(x, ctx)
    print(f"v(x) = {format_point(a)}")
    print(f"value cell contains v(x): {'yes' if contains(S.value_cell, a) else 'no'}")
    print(f"member: {'true' if polytope_contains(S, x) else 'false'}")
    return OK


def cmd_padic_divide(args):
    scene = load_scene(args.scene)
    S = _polytope(scene, args.S)
    A = S.value_cell
    bname, D = _boundary(scene, A, args.boundary, args.S)
    spec = scene.map_spec(args.eps) if args.eps else None
    eps = valuation_map(spec, scene.m, {d.support for d in D})
    T = [PAdicPolytope(S.ctx, d) for d in D]
    result = monotopic_division(S, eps, T)
    cells = [u.value_cell for u in result.U]
    names = [scene.add_precell(f"{args.S}.u{k}", c) for k, c in enumerate(cells)]
    cname = f"{args.S}.cells"
    scene.complexes[cname] = names
    gname = f"{args.S}.g"
    scene.maps[gname] = {"kind": "pieces", "pieces": [
        (d, f, 0, set_json(d)["constraints"]) for d, f in result.g.pieces]}
    scene.divisions[f"{args.S}.division"] = {"A": args.S, "boundary": bname, "cells": cname,
                                             "f": gname}
    report = check_division_certificate(A, D, result.g, cells, _box(scene, args))
    checked, bad = w_inequality_violations(result, eps, random.Random(args.seed), args.samples)
    report.record("sampled w inequality")
    for u, J, lhs, rhs in bad:
        report.record("sampled w inequality",
                      f"u={tuple(format_value(t) for t in u)} J={_sup(J)}: w={lhs} < {rhs}")
    report.notes["sampled points"] = checked
    lines = [f"divided {args.S} into {len(cells)} monotopes; {checked} sampled points checked"]
    lines += [f"  {n}: {c}" for n, c in zip(names, cells)]
    lines.append(report.text())
    _emit(args, scene, lines)
    return OK if report.ok else VIOLATION


def verify_scene(scene, box):
    """Oracle report for every object of the scene."""
    require_budget(box)
    report = Report(f"verify (box B={box.B})")
    report.record("valid precells")
    for name, cell in scene.precells.items():
        r = validate(cell)
        if not r.ok:
            report.record("valid precells", f"{name}: {'; '.join(r.violations)}")
            continue
        _faces_by_limits(report, name, cell, to_basic(cell), box)
    for name, s in scene.sets.items():
        _faces_by_limits(report, name, s, s, box)
    in_division = {rec["cells"] for rec in scene.divisions.values()}
    for name in scene.complexes:
        if name in in_division:
            continue
        members = scene.complex(name)
        if not members or any(not validate(c).ok for c in members):
            continue
        if is_closed_family(members):
            report.merge(check_closed_complex(members, box), f"{name}: ")
        else:
            report.merge(check_complex_family(members, box), f"{name}: ")
    for name, rec in scene.divisions.items():
        A = scene.precell(rec["A"])
        D = scene.complex(rec["boundary"])
        cells = scene.complex(rec["cells"])
        spec = scene.map_spec(rec["f"]) if rec.get("f") else None
        fmap = boundary_map(spec, scene.m, {d.support for d in D})
        report.merge(check_division_certificate(A, D, fmap, cells, box), f"{name}: ")
    return report


def _faces_by_limits(report, name, obj, basic, box):
    sup = sorted(basic.support)
    computed = set(face_supports(basic))
    if isinstance(obj, Precell):
        from_presentation = {F.support for F in faces(obj)}
        report.record("face supports agree")
        if from_presentation != computed:
            report.record("face supports agree", f"{name}: presentation and QE disagree")
    for r in range(len(sup) + 1):
        for J in combinations(sup, r):
            sub = check_face_by_limits(obj, frozenset(J), box)
            report.merge(sub, "faces by limits: ")
            report.notes.setdefault("inconclusive", 0)
            report.notes["inconclusive"] += sub.notes.get("inconclusive", 0)


def cmd_verify(args):
    scene = load_scene(args.scene)
    report = verify_scene(scene, _box(scene, args))
    if args.json:
        print(json.dumps(report.to_json(), indent=2, sort_keys=True))
    else:
        print(report.text())
    return OK if report.ok else VIOLATION


def cmd_render(args):
    scene = load_scene(args.scene)
    if scene.m != 2:
        raise SceneError(f"render needs m = 2, the scene has m = {scene.m}")
    if args.name:
        if args.name in scene.complexes:
            named = list(zip(scene.complexes[args.name], scene.complex(args.name)))
        else:
            named = [(args.name, scene.precell(args.name))]
    else:
        named = list(scene.precells.items())
    svg = render_svg(named, B=16, title=args.title or args.name)
    with open(args.output, "w", encoding="utf-8") as fh:
        fh.write(svg)
    print(f"wrote {args.output} ({len(named)} objects)")
    return OK


# parser ---------------------------------------------------------------------------------


def build_parser():
    p = argparse.ArgumentParser(prog="gammacell", description="Precells, faces and divisions in Gamma^m.")
    sub = p.add_subparsers(dest="verb", required=True)

    s = sub.add_parser("validate", help="validation report for every named object")
    s.add_argument("scene")
    s.set_defaults(run=cmd_validate)

    s = sub.add_parser("faces", help="faces and face tree of a precell or set")
    s.add_argument("scene")
    s.add_argument("name")
    s.set_defaults(run=cmd_faces)

    s = sub.add_parser("divide", help="monohedral division over a boundary complex")
    s.add_argument("scene")
    s.add_argument("A")
    s.add_argument("--boundary", help="complex covering the frontier (default: refined faces)")
    s.add_argument("--f", help="boundary map name (default: zero)")
    s.add_argument("--seed", type=int, default=0, help="seed for spot checks beyond the box")
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--box", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_divide)

    s = sub.add_parser("decompose", help="monohedral decomposition")
    s.add_argument("scene")
    s.add_argument("A")
    s.add_argument("--box", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_decompose)

    s = sub.add_parser("split", help="split a monohedral precell keeping its frontier")
    s.add_argument("scene")
    s.add_argument("A")
    s.add_argument("-n", type=int, required=True)
    s.add_argument("--box", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_split)

    s = sub.add_parser("padic-member", help="membership of a rational point in a p-adic polytope")
    s.add_argument("scene")
    s.add_argument("S")
    s.add_argument("--point", required=True, help='comma-separated rationals, e.g. "1,9/2"')
    s.set_defaults(run=cmd_padic_member)

    s = sub.add_parser("padic-divide", help="monotopic division with sampled w-inequality check")
    s.add_argument("scene")
    s.add_argument("S")
    s.add_argument("--eps", help="map name describing v o eps (default: zero)")
    s.add_argument("--boundary")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--samples", type=int, default=200)
    s.add_argument("--box", type=int)
    s.add_argument("-o", "--output")
    s.set_defaults(run=cmd_padic_divide)

    s = sub.add_parser("verify", help="oracle report; nonzero exit on any violation")
    s.add_argument("scene")
    s.add_argument("--box", type=int)
    s.add_argument("--json", action="store_true")
    s.set_defaults(run=cmd_verify)

    s = sub.add_parser("render", help="SVG of a two-dimensional scene")
    s.add_argument("scene")
    s.add_argument("-o", "--output", required=True)
    s.add_argument("--name", help="precell or complex to draw (default: all precells)")
    s.add_argument("--title")
    s.set_defaults(run=cmd_render)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.run(args)
    except SceneError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except GammacellError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return USAGE
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
