"""From value cells to 3-adic polytopes.

A polytope over the value cell W = {x1 >= 0, x2 >= x1} is every rational pair
whose entries are 0 or 3^k times a unit congruent to 1 mod 3, with valuation
vector in W.  We test a few points, project onto a face, and divide the
polytope over N^2 with the shape control v(eps(t)) = v(t1) on the first edge.
"""
import random
from fractions import Fraction

from gammacell.core import AffineMap, format_point
from gammacell.padic import (
    PAdicContext, PAdicPolytope, ValuationPiecewiseMap, in_DMR, monotopic_division, pi,
    polytope_contains, polytope_face, valuation_vector, w_inequality_violations,
)
from gammacell.precell import proper_faces, tower


def main():
    ctx = PAdicContext(3, 1)
    W = tower([(0,), (AffineMap.make(frozenset({0}), 0, {0: 1}),)])
    S = PAdicPolytope(ctx, W)
    print("value cell:", W)
    for x in [(1, 9), (1, 2), (Fraction(4, 7), 36), (0, 1), (9, 3)]:
        x = tuple(Fraction(t) for t in x)
        units = ", ".join("yes" if in_DMR(t, ctx) else "no" for t in x)
        print(f"  x = ({', '.join(map(str, x))}): v = {format_point(valuation_vector(x, ctx))}, "
              f"units ok: {units}, in S: {polytope_contains(S, x)}")

    T = polytope_face(S, {0})
    x = (Fraction(1), Fraction(9))
    y = pi({0}, x)
    print(f"\nprojection of (1, 9) onto the face of support {{1}}: ({y[0]}, {y[1]}), "
          f"in the face: {polytope_contains(T, y)}")

    A = tower([(0,), (0,)])
    Q = PAdicPolytope(ctx, A)
    maps = {F.support: (AffineMap.make(F.support, 0, {0: 1}) if 0 in F.support
                        else AffineMap.constant(F.support, 0))
            for F in proper_faces(A)}
    eps = ValuationPiecewiseMap.from_maps(2, maps)
    res = monotopic_division(Q, eps)
    print(f"\ndivision of the polytope over N^2: {len(res.U)} cells")
    for u, k in zip(res.U, res.owner):
        over = "closed" if k is None else f"over the face of support {sorted(i + 1 for i in res.T[k].support)}"
        print(f"  {str(u.value_cell):48} {over}")
    checked, bad = w_inequality_violations(res, eps, random.Random(0), samples=300)
    print(f"distance inequality at {checked} sampled points: {len(bad)} violations")


if __name__ == "__main__":
    main()
