"""Small exact linear algebra kernel over a ground field.

Matrices are lists of lists of field elements (Fractions over QQ, ints over
GF(p)); everything is computed by fraction-free-enough Gaussian elimination
with exact arithmetic.  This is deliberately dense: the systems that arise
here (cohomology ranks, null-homotopy solves, obstruction searches) stay in
the hundreds of unknowns.
"""

from __future__ import annotations


def zeros(field, rows, cols):
    return [[field.zero] * cols for _ in range(rows)]


def identity(field, n):
    return [[field.one if i == j else field.zero for j in range(n)]
            for i in range(n)]


def mat_mul(field, a, b):
    n, m = len(a), len(b[0]) if b else 0
    inner = len(b)
    out = zeros(field, n, m)
    for i in range(n):
        ai = a[i]
        for k in range(inner):
            c = ai[k]
            if field.is_zero(c):
                continue
            bk = b[k]
            oi = out[i]
            for j in range(m):
                if not field.is_zero(bk[j]):
                    oi[j] = field.add(oi[j], field.mul(c, bk[j]))
    return out


def rref(field, mat):
    """Reduced row echelon form; returns (new matrix, pivot columns)."""
    m = [row[:] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        pivot = None
        for i in range(r, rows):
            if not field.is_zero(m[i][c]):
                pivot = i
                break
        if pivot is None:
            continue
        m[r], m[pivot] = m[pivot], m[r]
        inv = field.inv(m[r][c])
        m[r] = [field.mul(inv, x) for x in m[r]]
        for i in range(rows):
            if i != r and not field.is_zero(m[i][c]):
                f = m[i][c]
                m[i] = [field.sub(x, field.mul(f, y)) for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return m, pivots


def rank(field, mat):
    if not mat or not mat[0]:
        return 0
    _, pivots = rref(field, mat)
    return len(pivots)


def solve(field, mat, rhs):
    """One exact solution of mat @ x = rhs, or None if inconsistent.

    ``rhs`` may be a vector or a matrix of stacked right-hand-side columns;
    a vector is returned for a vector input.
    """
    vector_input = rhs and not isinstance(rhs[0], list)
    rhs_cols = [[v] for v in rhs] if vector_input else [row[:] for row in rhs]
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    if rows == 0:
        width = 1 if vector_input else (len(rhs_cols[0]) if rhs_cols else 0)
        out = zeros(field, cols, width)
        return [r[0] for r in out] if vector_input else out
    aug = [mat[i][:] + rhs_cols[i] for i in range(rows)]
    red, pivots = rref(field, aug)
    width = len(rhs_cols[0])
    # inconsistent iff a pivot falls in the augmented block
    for c in pivots:
        if c >= cols:
            return None
    sol = zeros(field, cols, width)
    for r, c in enumerate(pivots):
        for j in range(width):
            sol[c][j] = red[r][cols + j]
    return [row[0] for row in sol] if vector_input else sol


def nullspace(field, mat, cols=None):
    """Basis (list of vectors) of the right kernel of ``mat``."""
    if not mat:
        n = cols or 0
        return [[field.one if i == j else field.zero for j in range(n)]
                for i in range(n)] if n else []
    n = len(mat[0])
    red, pivots = rref(field, mat)
    free = [c for c in range(n) if c not in pivots]
    basis = []
    for fc in free:
        vec = [field.zero] * n
        vec[fc] = field.one
        for r, pc in enumerate(pivots):
            vec[pc] = field.neg(red[r][fc])
        basis.append(vec)
    return basis
