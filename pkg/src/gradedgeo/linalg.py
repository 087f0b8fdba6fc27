"""Small exact linear algebra over the rationals.

Matrices are lists of rows of Fractions.  Everything here is plain Gaussian
elimination with exact arithmetic; sizes in this package stay tiny.
"""

from __future__ import annotations

from fractions import Fraction

Matrix = list[list[Fraction]]
Vector = list[Fraction]


def mat(rows) -> Matrix:
    return [[Fraction(x) for x in row] for row in rows]


def zeros(r: int, c: int) -> Matrix:
    return [[Fraction(0)] * c for _ in range(r)]


def identity(k: int) -> Matrix:
    out = zeros(k, k)
    for i in range(k):
        out[i][i] = Fraction(1)
    return out


def matmul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = zeros(rows, cols)
    for i in range(rows):
        for k in range(inner):
            if a[i][k]:
                for j in range(cols):
                    out[i][j] += a[i][k] * b[k][j]
    return out


def rref(m: Matrix) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and the pivot column indices."""
    a = [row[:] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        pivot = next((i for i in range(r, rows) if a[i][c]), None)
        if pivot is None:
            continue
        a[r], a[pivot] = a[pivot], a[r]
        inv = Fraction(1) / a[r][c]
        a[r] = [x * inv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a, pivots


def rank(m: Matrix) -> int:
    if not m:
        return 0
    return len(rref(m)[1])


def kernel_basis(m: Matrix, cols: int | None = None) -> list[Vector]:
    """Basis of the null space {v : m v = 0}."""
    if cols is None:
        cols = len(m[0]) if m else 0
    if not m:
        return [  # identity basis of the whole space
            [Fraction(1) if j == i else Fraction(0) for j in range(cols)]
            for i in range(cols)
        ]
    red, pivots = rref(m)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [Fraction(0)] * cols
        v[fc] = Fraction(1)
        for r, pc in enumerate(pivots):
            v[pc] = -red[r][fc]
        basis.append(v)
    return basis


def solve(m: Matrix, b: Vector) -> Vector | None:
    """One exact solution of m x = b, or None when inconsistent."""
    if not m:
        return [] if not any(b) else None
    cols = len(m[0])
    aug = [row[:] + [bb] for row, bb in zip(m, b)]
    red, pivots = rref(aug)
    for row in red:
        if not any(row[:cols]) and row[cols]:
            return None
    x = [Fraction(0)] * cols
    for r, pc in enumerate(pivots):
        if pc == cols:
            return None
        x[pc] = red[r][cols]
    return x


def inverse(m: Matrix) -> Matrix | None:
    k = len(m)
    if any(len(row) != k for row in m):
        raise ValueError("inverse needs a square matrix")
    aug = [row[:] + ident_row for row, ident_row in zip(m, identity(k))]
    red, pivots = rref(aug)
    if pivots != list(range(k)):
        return None
    return [row[k:] for row in red]


def transpose(m: Matrix) -> Matrix:
    if not m:
        return []
    return [list(col) for col in zip(*m)]


def neg_transpose(m: Matrix) -> Matrix:
    return [[-x for x in col] for col in zip(*m)] if m else []
