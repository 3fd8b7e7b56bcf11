"""Exact linear algebra over Fraction.

Small dense routines used by the exact backend: reduced row echelon form,
rank, nullspace, determinant and linear solve.  Matrices are lists of lists
of Fraction (rows).  Nothing here is performance critical -- sizes are at
most 28x28 -- so clarity wins over cleverness.
"""

from fractions import Fraction


def _as_fraction_rows(mat):
    return [[Fraction(x) for x in row] for row in mat]


def rref(mat):
    """Reduced row echelon form.

    Returns (rows, pivot_columns).  The input is not modified.
    """
    rows = _as_fraction_rows(mat)
    if not rows:
        return [], []
    ncols = len(rows[0])
    pivots = []
    r = 0
    for c in range(ncols):
        pivot_row = None
        for i in range(r, len(rows)):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            continue
        rows[r], rows[pivot_row] = rows[pivot_row], rows[r]
        pv = rows[r][c]
        rows[r] = [x / pv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rank(mat):
    _, pivots = rref(mat)
    return len(pivots)


def nullspace(mat):
    """Basis of the right nullspace, as a list of Fraction column vectors."""
    rows, pivots = rref(mat)
    if not rows:
        return []
    ncols = len(rows[0])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        vec = [Fraction(0)] * ncols
        vec[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            vec[pc] = -rows[r][fc]
        basis.append(vec)
    return basis


def det(mat):
    """Determinant by fraction-free-ish Gaussian elimination."""
    rows = _as_fraction_rows(mat)
    n = len(rows)
    if any(len(row) != n for row in rows):
        raise ValueError("det needs a square matrix")
    sign = 1
    out = Fraction(1)
    for c in range(n):
        pivot_row = None
        for i in range(c, n):
            if rows[i][c] != 0:
                pivot_row = i
                break
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != c:
            rows[c], rows[pivot_row] = rows[pivot_row], rows[c]
            sign = -sign
        pv = rows[c][c]
        out *= pv
        for i in range(c + 1, n):
            if rows[i][c] != 0:
                f = rows[i][c] / pv
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[c])]
    return sign * out


def solve(mat, rhs):
    """Solve A x = b exactly.  Raises ValueError if A is singular."""
    n = len(mat)
    aug = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(mat)]
    rows, pivots = rref(aug)
    if len(pivots) != n or any(p >= n for p in pivots):
        raise ValueError("singular system")
    return [rows[i][n] for i in range(n)]


def matmul(a, b):
    bn = len(b)
    bm = len(b[0]) if bn else 0
    out = []
    for row in a:
        acc = [Fraction(0)] * bm
        for k, x in enumerate(row):
            if x != 0:
                brow = b[k]
                for j in range(bm):
                    if brow[j] != 0:
                        acc[j] += x * brow[j]
        out.append(acc)
    return out


def matvec(a, v):
    out = []
    for row in a:
        s = Fraction(0)
        for x, y in zip(row, v):
            if x != 0 and y != 0:
                s += x * y
        out.append(s)
    return out


def identity(n):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
