"""Exact Gaussian elimination on small rational matrices."""
from fractions import Fraction


def rref(rows):
    """Reduced row echelon form; returns (matrix, pivot columns)."""
    m = [[Fraction(x) for x in r] for r in rows]
    pivots = []
    r = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][col] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        p = m[r][col]
        m[r] = [x / p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col] != 0:
                f = m[i][col]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m, pivots


def solve(a, b):
    """One solution of ``a x = b`` (free variables set to 0), or ``None``."""
    if not a:
        return []
    n = len(a[0])
    aug = [list(row) + [rhs] for row, rhs in zip(a, b)]
    m, pivots = rref(aug)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for row, col in zip(m, pivots):
        x[col] = row[n]
    return x


def nullspace(rows, n):
    """Basis of ``{x : row . x = 0 for all rows}`` in Q^n."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    m, pivots = rref(rows)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * n
        v[f] = Fraction(1)
        for row, col in zip(m, pivots):
            v[col] = -row[f]
        basis.append(v)
    return basis
