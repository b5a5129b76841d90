"""Exact integer and rational matrix utilities.

Everything here works on plain nested tuples/lists of python ints (or
Fractions where stated) so results are exact regardless of size.  numpy only
appears downstream, for float paths.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def mat_copy(M):
    return [list(row) for row in M]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(A, B):
    """Exact product of two matrices of ints or Fractions."""
    rows, inner, cols = len(A), len(B), len(B[0])
    assert len(A[0]) == inner
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        Ai = A[i]
        for k in range(inner):
            a = Ai[k]
            if a == 0:
                continue
            Bk = B[k]
            row = out[i]
            for j in range(cols):
                row[j] += a * Bk[j]
    return out


def mat_transpose(M):
    return [list(col) for col in zip(*M)]


def bareiss_det(M) -> int:
    """Determinant of a square integer matrix by fraction-free elimination."""
    A = mat_copy(M)
    n = len(A)
    sign = 1
    prev = 1
    for k in range(n - 1):
        if A[k][k] == 0:
            for i in range(k + 1, n):
                if A[i][k] != 0:
                    A[k], A[i] = A[i], A[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def fraction_inverse(M):
    """Inverse of a square integer (or Fraction) matrix as Fractions."""
    n = len(M)
    A = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(M)]
    for col in range(n):
        piv = next((r for r in range(col, n) if A[r][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [x / pv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:] for row in A]


def row_hnf(M):
    """Row-style Hermite normal form of an integer matrix.

    Unique representative of the left-GL_m(Z) orbit: row echelon with
    positive pivots and the entries above each pivot reduced into
    [0, pivot).  Zero rows sink to the bottom.
    """
    A = mat_copy(M)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if A[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        # kill everything below the pivot with extended-gcd row ops
        for i in range(r + 1, rows):
            while A[i][c] != 0:
                q = A[r][c] // A[i][c]
                A[r] = [x - q * y for x, y in zip(A[r], A[i])]
                A[r], A[i] = A[i], A[r]
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
        r += 1
        if r == rows:
            break
    return A


def column_hnf(M):
    """Column-style Hermite form: canonical representative mod right GL_k(Z)."""
    return mat_transpose(row_hnf(mat_transpose(M)))


def row_hnf_transform(M):
    """(H, V) with V @ M = H, V unimodular, H the row Hermite form.

    Same conventions as row_hnf; implemented independently with an
    explicit transform so the two can cross-check each other in tests.
    """
    A = mat_copy(M)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    V = identity(rows)
    r = 0
    for c in range(cols):
        piv = None
        for i in range(r, rows):
            if A[i][c] != 0:
                piv = i
                break
        if piv is None:
            continue
        A[r], A[piv] = A[piv], A[r]
        V[r], V[piv] = V[piv], V[r]
        for i in range(r + 1, rows):
            while A[i][c] != 0:
                q = A[r][c] // A[i][c]
                A[r] = [x - q * y for x, y in zip(A[r], A[i])]
                V[r] = [x - q * y for x, y in zip(V[r], V[i])]
                A[r], A[i] = A[i], A[r]
                V[r], V[i] = V[i], V[r]
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            V[r] = [-x for x in V[r]]
        for i in range(r):
            q = A[i][c] // A[r][c]
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                V[i] = [x - q * y for x, y in zip(V[i], V[r])]
        r += 1
        if r == rows:
            break
    return A, V


def column_hnf_transform(M):
    """(H, U) with M @ U = H, U unimodular, H the column Hermite form."""
    Ht, Vt = row_hnf_transform(mat_transpose(M))
    return mat_transpose(Ht), mat_transpose(Vt)


def integer_kernel(M):
    """Basis of {x integer vector : M x = 0}, as a list of columns.

    Zero columns of the column Hermite form correspond to kernel columns
    of the transform.
    """
    H, U = column_hnf_transform(M)
    rows = len(H)
    cols = len(H[0]) if rows else 0
    out = []
    for j in range(cols):
        if all(H[i][j] == 0 for i in range(rows)):
            out.append([U[i][j] for i in range(len(U))])
    return out


def snf_diagonal(M):
    """Diagonal of the Smith normal form (elementary divisors, nonneg).

    Pivot selection by minimal absolute value plus plain eliminations, so
    each failed clearing pass strictly shrinks the pivot and the loop
    terminates.  Fine for the small matrices this package meets.
    """
    A = mat_copy(M)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    diag = []
    t = 0
    while t < min(rows, cols):
        # pivot: entry of minimal nonzero absolute value in the block
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = abs(A[i][j])
                if v and (best is None or v < best):
                    best = v
                    piv = (i, j)
        if piv is None:
            break
        i0, j0 = piv
        A[t], A[i0] = A[i0], A[t]
        for row in A:
            row[t], row[j0] = row[j0], row[t]
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
        p = A[t][t]
        # single elimination pass; leftover remainders are < p in absolute
        # value, so restarting with a fresh (smaller) pivot terminates
        clean = True
        for i in range(t + 1, rows):
            q = A[i][t] // p
            if q:
                A[i] = [x - q * y for x, y in zip(A[i], A[t])]
            if A[i][t]:
                clean = False
        for j in range(t + 1, cols):
            q = A[t][j] // p
            if q:
                for row in A:
                    row[j] -= q * row[t]
            if A[t][j]:
                clean = False
        if not clean:
            continue
        # pivot must divide the remaining block
        witness = next(((i, j) for i in range(t + 1, rows)
                        for j in range(t + 1, cols) if A[i][j] % p), None)
        if witness is not None:
            A[t] = [x + y for x, y in zip(A[t], A[witness[0]])]
            continue
        diag.append(p)
        t += 1
    return diag


def minors_gcd(M, k: int) -> int:
    """gcd of all k x k minors of an integer matrix (0 when all vanish)."""
    from itertools import combinations

    rows = len(M)
    cols = len(M[0]) if rows else 0
    g = 0
    for ri in combinations(range(rows), k):
        for ci in combinations(range(cols), k):
            sub = [[M[i][j] for j in ci] for i in ri]
            g = gcd(g, bareiss_det(sub))
            if g == 1:
                return 1
    return g
