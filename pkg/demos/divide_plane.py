"""Dividing N^2 into monohedral cells.

N^2 is not monohedral: its two edges {x2 = +inf} and {x1 = +inf} are
incomparable faces.  We divide it over its boundary, first with no shape
constraint and then asking every cell to stay at distance at least the
coordinate sum from the facet it hugs, and let the oracle certify both.
"""
from gammacell.division import (
    CASE_COUNTS, boundary_complex, coordinate_sum_boundary, monohedral_decomposition,
    monohedral_division,
)
from gammacell.oracle import BoxSpec, check_closed_complex, check_division_certificate
from gammacell.precell import facets, is_monohedral, tower


def describe(cells):
    for c in cells:
        fs = facets(c)
        hugs = "closed" if not fs else "facet " + "{" + ",".join(str(i + 1) for i in sorted(fs[0].support)) + "}"
        print(f"  {str(c):50} monohedral={is_monohedral(c)}  {hugs}")


def main():
    A = tower([(0,), (0,)])
    D = list(boundary_complex(A))
    print("A =", A)
    print("boundary complex:", ", ".join(str(d) for d in D))
    box = BoxSpec(2, 12)

    for label, f in (("f = 0", None),
                     ("f = coordinate sum", coordinate_sum_boundary(2, {d.support for d in D}))):
        CASE_COUNTS.clear()
        cells = list(monohedral_division(A, f, D))
        print(f"\n{label}: {len(cells)} cells")
        describe(cells)
        report = check_division_certificate(A, D, f, cells, box)
        print("certificate:", "ok" if report.ok else report.text())
        print("recursion branches:", dict(sorted(CASE_COUNTS.items())))

    members = list(monohedral_decomposition(A))
    print(f"\nclosed decomposition of the closure: {len(members)} members")
    print("closed complex check:", "ok" if check_closed_complex(members, box).ok else "FAILED")


if __name__ == "__main__":
    main()
