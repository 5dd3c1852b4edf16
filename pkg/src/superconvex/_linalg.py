"""Exact rational linear algebra backed by sympy's DomainMatrix."""

from fractions import Fraction

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

from .poly import as_fraction


def _qq(x):
    x = as_fraction(x)
    return QQ(x.numerator, x.denominator)


def _frac(q):
    return Fraction(int(q.numerator), int(q.denominator))


def to_domain(rows, ncols=None):
    rows = [list(r) for r in rows]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    return DomainMatrix([[_qq(v) for v in r] for r in rows], (len(rows), ncols), QQ)


def exact_rank(rows, ncols=None):
    """Rank of a list of rational row vectors."""
    rows = [r for r in rows]
    if not rows:
        return 0
    return to_domain(rows, ncols).rank()


def exact_nullspace(rows, ncols):
    """Basis (list of Fraction vectors) of {v : rows @ v = 0}."""
    if not rows:
        return [[Fraction(int(i == j)) for j in range(ncols)] for i in range(ncols)]
    ns = to_domain(rows, ncols).nullspace()
    return [[_frac(v) for v in row] for row in ns.to_Matrix().tolist()] if ns.shape[0] else []


def exact_solve(rows, rhs):
    """One solution x of rows @ x = rhs, or None when inconsistent."""
    m = len(rows)
    ncols = len(rows[0])
    aug = to_domain([list(r) + [b] for r, b in zip(rows, rhs)], ncols + 1)
    rref, pivots = aug.rref()
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    mat = rref.to_Matrix()
    for row, col in enumerate(pivots):
        x[col] = _frac(QQ.convert(mat[row, ncols])) / _frac(QQ.convert(mat[row, col]))
    assert m >= len(pivots)
    return x


def exact_det(rows):
    """Determinant of a square rational matrix."""
    n = len(rows)
    if n == 0:
        return Fraction(1)
    return _frac(to_domain(rows, n).det())


def pivot_columns(rows, ncols):
    """Indices of pivot columns in the row echelon form."""
    if not rows:
        return ()
    _, pivots = to_domain(rows, ncols).rref()
    return tuple(pivots)


def fraction_det(rows):
    """Determinant by fraction-exact Gaussian elimination (small matrices)."""
    a = [[as_fraction(v) for v in r] for r in rows]
    n = len(a)
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col]), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            det = -det
        det *= a[col][col]
        inv = 1 / a[col][col]
        for r in range(col + 1, n):
            f = a[r][col] * inv
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    return det


def is_psd_exact(rows):
    """Exact positive semidefiniteness test by symmetric elimination."""
    a = [[as_fraction(v) for v in r] for r in rows]
    n = len(a)
    for i in range(n):
        for j in range(n):
            if a[i][j] != a[j][i]:
                raise ValueError("matrix is not symmetric")
    active = list(range(n))
    while active:
        k = active.pop(0)
        d = a[k][k]
        if d < 0:
            return False
        if d == 0:
            if any(a[k][j] for j in active):
                return False
            continue
        for i in active:
            f = a[i][k] / d
            if f:
                for j in active:
                    a[i][j] -= f * a[k][j]
    return True
