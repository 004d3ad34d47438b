"""Exact integer and rational linear algebra.

Matrices are plain tuples of row tuples holding Python ints (or
``Fraction`` where a rational intermediate is unavoidable).  Nothing in
here touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import SingularMatrix

Matrix = tuple  # tuple[tuple[int, ...], ...]


def as_matrix(rows: Sequence[Sequence[int]]) -> Matrix:
    out = tuple(tuple(r) for r in rows)
    if out and len({len(r) for r in out}) != 1:
        raise ValueError("ragged matrix")
    return out


def shape(m: Matrix) -> tuple[int, int]:
    return len(m), (len(m[0]) if m else 0)


def identity(n: int) -> Matrix:
    return tuple(tuple(int(i == j) for j in range(n)) for i in range(n))


def zeros(r: int, c: int) -> Matrix:
    return tuple((0,) * c for _ in range(r))


def transpose(m: Matrix) -> Matrix:
    return tuple(zip(*m)) if m else ()


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(m: Matrix, v: Sequence) -> tuple:
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def vecmat(v: Sequence, m: Matrix) -> tuple:
    return tuple(sum(x * row[j] for x, row in zip(v, m)) for j in range(len(m[0])))


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def bilinear(gram: Matrix, u: Sequence, v: Sequence):
    """``u^T · gram · v`` for coordinate vectors ``u`` and ``v``."""
    return dot(u, matvec(gram, v))


def congruent(gram: Matrix, g: Matrix) -> Matrix:
    """``g^T · gram · g``: the Gram matrix in the basis given by the columns of ``g``."""
    return matmul(matmul(transpose(g), gram), g)


def block_diag(*blocks: Matrix) -> Matrix:
    n = sum(len(b) for b in blocks)
    rows = []
    offset = 0
    for b in blocks:
        k = len(b)
        for row in b:
            rows.append((0,) * offset + tuple(row) + (0,) * (n - offset - k))
        offset += k
    return tuple(rows)


def is_symmetric(m: Matrix) -> bool:
    return all(m[i][j] == m[j][i] for i in range(len(m)) for j in range(i))


def det(m: Matrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def inverse_rational(m: Matrix) -> Matrix:
    """Inverse over the rationals (Gauss-Jordan on ``Fraction`` entries)."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise SingularMatrix("matrix is not invertible")
        a[k], a[piv] = a[piv], a[k]
        p = a[k][k]
        a[k] = [x / p for x in a[k]]
        for i in range(n):
            if i != k and a[i][k] != 0:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
    return tuple(tuple(row[n:]) for row in a)


def solve_rational(m: Matrix, rhs: Sequence) -> tuple:
    """Solve ``m · x = rhs`` for square nonsingular ``m`` over the rationals."""
    return matvec(inverse_rational(m), rhs)


# --------------------------------------------------------------------------
# Smith and Hermite normal forms


@dataclass(frozen=True)
class SnfDecomposition:
    """``u · m · v == diag(d)`` with ``u``, ``v`` unimodular.

    ``d`` has ``min(rows, cols)`` entries, all non-negative, each dividing
    the next (zeros trail).
    """

    d: tuple
    u: Matrix
    v: Matrix

    @property
    def rank(self) -> int:
        return sum(1 for x in self.d if x != 0)

    def diagonal_matrix(self, rows: int, cols: int) -> Matrix:
        return tuple(tuple(self.d[i] if i == j and i < len(self.d) else 0
                           for j in range(cols)) for i in range(rows))


def smith_normal_form(m: Matrix) -> SnfDecomposition:
    """Smith normal form with unimodular transforms.

    Standard elimination: bring the smallest nonzero entry of the active
    block to the pivot, clear its row and column by division with
    remainder, then enforce divisibility by folding an offending row into
    the pivot row and repeating.
    """
    rows, cols = shape(m)
    a = [list(r) for r in m]
    u = [list(r) for r in identity(rows)]
    v = [list(r) for r in identity(cols)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, k):  # row_dst += k * row_src
        a[dst] = [x + k * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + k * y for x, y in zip(u[dst], u[src])]

    def add_col(dst, src, k):  # col_dst += k * col_src
        for r in a:
            r[dst] += k * r[src]
        for r in v:
            r[dst] += k * r[src]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    if a[i][j] != 0 and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                        best = (i, j)
            if best is None:
                return _finish_snf(a, u, v)
            swap_rows(t, best[0])
            swap_cols(t, best[1])
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                q = a[i][t] // p
                if q:
                    add_row(i, t, -q)
                if a[i][t]:
                    dirty = True
            for j in range(t + 1, cols):
                q = a[t][j] // p
                if q:
                    add_col(j, t, -q)
                if a[t][j]:
                    dirty = True
            if dirty:
                continue
            bad = next((i for i in range(t + 1, rows)
                        for j in range(t + 1, cols) if a[i][j] % p), None)
            if bad is None:
                break
            add_row(t, bad, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return _finish_snf(a, u, v)


def _finish_snf(a, u, v) -> SnfDecomposition:
    k = min(len(a), len(a[0]) if a else 0)
    d = tuple(abs(a[i][i]) for i in range(k))
    # pivots are already non-negative except possibly for early return paths
    for i in range(k):
        if a[i][i] < 0:
            u[i] = [-x for x in u[i]]
    return SnfDecomposition(d=d, u=as_matrix(u), v=as_matrix(v))


def elementary_divisors(m: Matrix) -> tuple:
    """Nonzero Smith invariants of ``m``."""
    return tuple(x for x in smith_normal_form(m).d if x)


def hermite_normal_form(m: Matrix) -> Matrix:
    """Row-style Hermite normal form (upper echelon, positive pivots,
    entries above each pivot reduced into ``[0, pivot)``); zero rows dropped.
    """
    a = [list(r) for r in m]
    rows, cols = shape(m)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if a[i][c] != 0]
            if not nz:
                break
            i0 = min(nz, key=lambda i: abs(a[i][c]))
            a[r], a[i0] = a[i0], a[r]
            done = True
            for i in range(r + 1, rows):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                    if a[i][c]:
                        done = False
            if done:
                break
        if a[r][c] == 0:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
        for i in range(r):
            q = a[i][c] // a[r][c]
            if q:
                a[i] = [x - q * y for x, y in zip(a[i], a[r])]
        r += 1
    return as_matrix(a[:r]) if r else ()


def kernel_saturation(m: Matrix) -> Matrix:
    """Basis (as rows) of the saturated left kernel ``{x in Z^r : x · m = 0}``.

    The rows of ``u`` from ``u · m · v = diag(d)`` lying past the rank span
    the kernel, and since ``u`` is unimodular they extend to a basis of
    ``Z^r``, so the span is primitive.  The basis is returned in Hermite
    normal form for reproducibility.
    """
    rows, _ = shape(m)
    if rows == 0:
        return ()
    snf = smith_normal_form(m)
    k = snf.rank
    basis = snf.u[k:]
    if not basis:
        return ()
    return hermite_normal_form(basis)


def rank(m: Matrix) -> int:
    return smith_normal_form(m).rank if m else 0


def signature(m: Matrix) -> tuple[int, int]:
    """``(n_plus, n_minus)`` of a nondegenerate symmetric matrix.

    Diagonalizes by congruence over the rationals.  A zero pivot with a
    nonzero off-diagonal partner is repaired by adding that basis vector
    to the pivot one, which makes the new diagonal entry ``2 m_ij``.
    """
    if not is_symmetric(m):
        raise ValueError("signature requires a symmetric matrix")
    if det(m) == 0:
        raise SingularMatrix("signature of a degenerate form")
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    pos = neg = 0
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][i] != 0), None)
        if piv is None:
            i, j = next((i, j) for i in range(k, n) for j in range(i + 1, n) if a[i][j] != 0)
            # basis change b_i <- b_i + b_j
            a[i] = [x + y for x, y in zip(a[i], a[j])]
            for row in a:
                row[i] += row[j]
            piv = i
        a[k], a[piv] = a[piv], a[k]
        for row in a:
            row[k], row[piv] = row[piv], row[k]
        p = a[k][k]
        if p > 0:
            pos += 1
        else:
            neg += 1
        for i in range(k + 1, n):
            f = a[i][k] / p
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
                for row in a:
                    row[i] -= f * row[k]
    return pos, neg
