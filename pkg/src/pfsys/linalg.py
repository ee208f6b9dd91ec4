"""Exact dense linear algebra over the rationals.

Small matrices only (at most 15 x 45 in this package), so plain fraction
Gaussian elimination is fine.  Rows and matrices are tuples of Fractions;
reduced row echelon form is the canonical representative used for structural
equality of subspaces and spans.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

Row = tuple[Fraction, ...]
Matrix = tuple[Row, ...]


def as_matrix(rows: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in row) for row in rows)


def rref(rows: Sequence[Sequence]) -> tuple[Matrix, tuple[int, ...]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(map(Fraction, row)) for row in rows]
    if not m:
        return (), ()
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        pivot_row = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pivot_row is None:
            continue
        m[r], m[pivot_row] = m[pivot_row], m[r]
        inv = Fraction(1) / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return tuple(tuple(row) for row in m[:r]), tuple(pivots)


def rank(rows: Sequence[Sequence]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> Matrix:
    """RREF basis of {x : M x = 0} (x indexed by the columns of M)."""
    rows = list(rows)
    if ncols is None:
        if not rows:
            raise ValueError("ncols required for an empty matrix")
        ncols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for r, c in enumerate(pivots):
            v[c] = -red[r][f]
        basis.append(tuple(v))
    red_basis, _ = rref(basis)
    return red_basis


def det(rows: Sequence[Sequence]) -> Fraction:
    m = [list(map(Fraction, row)) for row in rows]
    n = len(m)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        pivot_row = next((i for i in range(c, n) if m[i][c] != 0), None)
        if pivot_row is None:
            return Fraction(0)
        if pivot_row != c:
            m[c], m[pivot_row] = m[pivot_row], m[c]
            sign = -sign
        result *= m[c][c]
        inv = Fraction(1) / m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] * inv
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return sign * result


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = list(zip(*b))
    return tuple(
        tuple(sum((Fraction(x) * Fraction(y) for x, y in zip(row, col)), Fraction(0)) for col in bt)
        for row in a
    )


def matvec(a: Sequence[Sequence], v: Sequence) -> Row:
    return tuple(sum((Fraction(x) * Fraction(y) for x, y in zip(row, v)), Fraction(0)) for row in a)


def transpose(a: Sequence[Sequence]) -> Matrix:
    return tuple(tuple(Fraction(x) for x in col) for col in zip(*a))


def identity(n: int) -> Matrix:
    return tuple(
        tuple(Fraction(1 if i == j else 0) for j in range(n)) for i in range(n)
    )


def inverse(a: Sequence[Sequence]) -> Matrix:
    n = len(a)
    aug = [list(map(Fraction, row)) + [Fraction(1 if i == j else 0) for j in range(n)] for i, row in enumerate(a)]
    red, pivots = rref(aug)
    if list(pivots[:n]) != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return tuple(tuple(row[n:]) for row in red[:n])


def solve(a: Sequence[Sequence], b: Sequence) -> Row | None:
    """One solution of A x = b, or None when inconsistent."""
    rows = [list(map(Fraction, row)) + [Fraction(bi)] for row, bi in zip(a, b)]
    ncols = len(a[0]) if a else 0
    red, pivots = rref(rows)
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for r, c in enumerate(pivots):
        x[c] = red[r][ncols]
    return tuple(x)


def row_space_contains(basis_rref: Matrix, v: Sequence) -> bool:
    """Membership test against an RREF basis (reduces v by the pivots)."""
    v = list(map(Fraction, v))
    for row in basis_rref:
        pivot = next((c for c, x in enumerate(row) if x != 0), None)
        if pivot is None:
            continue
        if v[pivot] != 0:
            f = v[pivot]
            v = [a - f * b for a, b in zip(v, row)]
    return all(x == 0 for x in v)
