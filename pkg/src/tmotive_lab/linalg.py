"""Small generic matrix helpers over entry types that implement +, -, *."""
from __future__ import annotations

from typing import Any, Callable

Matrix = list[list[Any]]


def is_exact_zero(x) -> bool:
    f = getattr(x, "is_exact_zero", None)
    if f is not None:
        return f()
    return x.is_zero()


def shape(A: Matrix) -> tuple[int, int]:
    return len(A), (len(A[0]) if A else 0)


def mat_map(fn: Callable, A: Matrix) -> Matrix:
    return [[fn(x) for x in row] for row in A]


def transpose(A: Matrix) -> Matrix:
    return [list(col) for col in zip(*A)]


def identity(n: int, one, zero) -> Matrix:
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def zeros(n: int, m: int, zero) -> Matrix:
    return [[zero for _ in range(m)] for _ in range(n)]


def matadd(A: Matrix, B: Matrix) -> Matrix:
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matsub(A: Matrix, B: Matrix) -> Matrix:
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def matmul(A: Matrix, B: Matrix, zero=None) -> Matrix:
    n, k = shape(A)
    k2, m = shape(B)
    if k != k2:
        raise ValueError(f"shape mismatch {n}x{k} @ {k2}x{m}")
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for l in range(k):
                a, b = A[i][l], B[l][j]
                if is_exact_zero(a) or is_exact_zero(b):
                    continue
                term = a * b
                acc = term if acc is None else acc + term
            if acc is None:
                acc = zero if zero is not None else A[i][0].zero_like()
            row.append(acc)
        out.append(row)
    return out


def block(rows: list[list[Matrix]]) -> Matrix:
    """Assemble a matrix from a grid of blocks."""
    out: Matrix = []
    for brow in rows:
        h = len(brow[0])
        for i in range(h):
            line = []
            for blk in brow:
                line.extend(blk[i])
            out.append(line)
    return out


def submatrix(A: Matrix, r0: int, r1: int, c0: int, c1: int) -> Matrix:
    return [row[c0:c1] for row in A[r0:r1]]


def minor(A: Matrix, i: int, j: int) -> Matrix:
    return [row[:j] + row[j + 1 :] for k, row in enumerate(A) if k != i]


def det(A: Matrix):
    """Cofactor expansion; intended for the small r x r matrices of a motive."""
    n = len(A)
    if n == 1:
        return A[0][0]
    if n == 2:
        return A[0][0] * A[1][1] - A[0][1] * A[1][0]
    acc = None
    for j in range(n):
        if is_exact_zero(A[0][j]):
            continue
        term = A[0][j] * det(minor(A, 0, j))
        if j % 2:
            term = -term
        acc = term if acc is None else acc + term
    return acc if acc is not None else A[0][0].zero_like()


def adjugate(A: Matrix) -> Matrix:
    n = len(A)
    if n == 1:
        return [[A[0][0].one_like()]]
    out = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            c = det(minor(A, i, j))
            out[j][i] = -c if (i + j) % 2 else c
    return out


def field_inverse(A: Matrix) -> Matrix:
    """Gauss-Jordan inverse for entries of an exact field (ExactCoef, RatFunc)."""
    n = len(A)
    one, zero = A[0][0].one_like(), A[0][0].zero_like()
    M = [list(row) + [one if i == j else zero for j in range(n)] for i, row in enumerate(A)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not M[r][c].is_zero()), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        M[c], M[piv] = M[piv], M[c]
        inv = M[c][c].inv()
        M[c] = [x * inv for x in M[c]]
        for r in range(n):
            if r != c and not M[r][c].is_zero():
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [row[n:] for row in M]
