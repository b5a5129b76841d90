"""Even positive definite lattices and their bordered quadratic forms.

A lattice is carried by its Gram matrix S (all arithmetic on S is exact).
The two bordered forms attach hyperbolic planes around -S and then around
the first bordered form:

    S0 = [[0, 0, 1], [0, -S, 0], [1, 0, 0]]        (signature (1, n+1))
    S1 = [[0, 0, 1], [0, S0, 0], [1, 0, 0]]        (signature (2, n+2))

so that S0[y] = 2 y_first y_last - S[y_mid] and, writing a vector of the
big space as v = (a, c, x, d, b) with x of length n,

    S1[v] = 2ab + 2cd - S[x].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

import numpy as np

from .errors import NotEven, NotPositiveDefinite, NotSymmetric, RankDeficient
from .intmat import (
    bareiss_det,
    column_hnf,
    fraction_inverse,
    minors_gcd,
    snf_diagonal,
)

# Root lattice Gram matrices.  Only the last one is tied to the E8 example
# worked out downstream; the others are the standard textbook matrices.
CATALOG = {
    "A1": ((2,),),
    "A2": ((2, -1), (-1, 2)),
    "A4": (
        (2, -1, 0, 0),
        (-1, 2, -1, 0),
        (0, -1, 2, -1),
        (0, 0, -1, 2),
    ),
    "D4": (
        (2, -1, 0, 0),
        (-1, 2, -1, -1),
        (0, -1, 2, 0),
        (0, -1, 0, 2),
    ),
    "E8": (
        (2, -1, 0, 0, 0, 0, 0, 0),
        (-1, 2, -1, 0, 0, 0, 0, 0),
        (0, -1, 2, -1, 0, 0, 0, 0),
        (0, 0, -1, 2, -1, 0, 0, 0),
        (0, 0, 0, -1, 2, -1, 0, -1),
        (0, 0, 0, 0, -1, 2, -1, 0),
        (0, 0, 0, 0, 0, -1, 2, 0),
        (0, 0, 0, 0, -1, 0, 0, 2),
    ),
}


@dataclass(frozen=True)
class GramLattice:
    """An even positive definite Gram matrix with its level."""

    n: int
    S: tuple  # tuple of tuples of ints
    q: int    # level: least q with q * S^{-1} even integral

    @property
    def det(self) -> int:
        return bareiss_det([list(r) for r in self.S])

    def gram(self):
        return [list(r) for r in self.S]

    def gram_np(self) -> np.ndarray:
        return np.array(self.S, dtype=np.int64)

    def quad(self, x) -> int:
        """S[x] for an integer vector, exactly."""
        total = 0
        for i, xi in enumerate(x):
            if xi:
                row = self.S[i]
                total += xi * sum(r * xj for r, xj in zip(row, x))
        return total

    def inverse(self):
        """S^{-1} as a Fraction matrix."""
        return fraction_inverse(self.gram())


@dataclass(frozen=True)
class BorderedForms:
    """The two hyperbolic borderings of a Gram matrix."""

    S0: tuple
    S1: tuple
    Q0: tuple  # S0 / 2 as Fractions

    def S0_np(self) -> np.ndarray:
        return np.array(self.S0, dtype=np.int64)

    def S1_np(self) -> np.ndarray:
        return np.array(self.S1, dtype=np.int64)


def validate_gram(S) -> GramLattice:
    """Check symmetry, evenness, positive definiteness; compute the level.

    Raises NotSymmetric / NotEven / NotPositiveDefinite with the offending
    location.  Accepts any nested sequence of ints (numpy arrays included).
    """
    rows = [[int(x) for x in row] for row in S]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise NotSymmetric("matrix is not square")
    for i in range(n):
        for j in range(i + 1, n):
            if rows[i][j] != rows[j][i]:
                raise NotSymmetric(f"entries ({i},{j}) and ({j},{i}) differ")
    for i in range(n):
        if rows[i][i] % 2 != 0:
            raise NotEven(i, rows[i][i])
    for k in range(1, n + 1):
        minor = bareiss_det([r[:k] for r in rows[:k]])
        if minor <= 0:
            raise NotPositiveDefinite(k)
    Stup = tuple(tuple(r) for r in rows)
    return GramLattice(n=n, S=Stup, q=_level_from_inverse(fraction_inverse(rows)))


def _level_from_inverse(inv) -> int:
    """Least q making q * S^{-1} integral with even diagonal."""
    q = 1
    for i, row in enumerate(inv):
        for j, e in enumerate(row):
            f = Fraction(e)
            if i == j:
                f = f / 2  # need q * e to be even
            if f == 0:
                continue
            need = f.denominator
            q = q * need // gcd(q, need)
    return q


def level(L: GramLattice) -> int:
    return L.q


def bordered_forms(L: GramLattice) -> BorderedForms:
    n = L.n
    m0 = n + 2
    S0 = [[0] * m0 for _ in range(m0)]
    S0[0][m0 - 1] = S0[m0 - 1][0] = 1
    for i in range(n):
        for j in range(n):
            S0[1 + i][1 + j] = -L.S[i][j]
    m1 = n + 4
    S1 = [[0] * m1 for _ in range(m1)]
    S1[0][m1 - 1] = S1[m1 - 1][0] = 1
    for i in range(m0):
        for j in range(m0):
            S1[1 + i][1 + j] = S0[i][j]
    Q0 = tuple(tuple(Fraction(x, 2) for x in row) for row in S0)
    return BorderedForms(
        S0=tuple(tuple(r) for r in S0),
        S1=tuple(tuple(r) for r in S1),
        Q0=Q0,
    )


def short_vectors(L: GramLattice, bound: int):
    """All x != 0 with S[x] <= bound, one representative per {x, -x}.

    Enumeration uses a float Cholesky factorization for interval bounds and
    an exact integer acceptance test, so the output is exhaustive and exact.
    Returns (vectors, paired) with paired=True meaning each vector stands
    for the pair {x, -x}; vectors are sorted by (S[x], coordinates).
    """
    if bound < 0:
        raise ValueError("bound must be >= 0")
    if bound == 0:
        return [], True
    n = L.n
    Sf = np.array(L.S, dtype=float)
    # S = R^t R with R upper triangular; S[x] = sum_i (R x)_i^2
    R = np.linalg.cholesky(Sf).T
    Rinv = np.linalg.inv(R)
    out = []
    x = [0] * n
    slack = 1e-9 * max(1.0, bound)

    def descend(i: int, remaining: float, partial):
        # remaining float budget for coordinates 0..i; partial is the
        # R-image contribution of coordinates i+1..n-1
        if i < 0:
            if any(x):
                val = L.quad(x)
                if val <= bound:
                    out.append((val, tuple(x)))
            return
        # (R x)_i = R_ii x_i + partial_i; need its square <= remaining
        r = math.sqrt(max(remaining, 0.0))
        center = -partial[i] / R[i, i]
        lo = math.ceil(center - r / R[i, i] - 1e-9)
        hi = math.floor(center + r / R[i, i] + 1e-9)
        for xi in range(lo, hi + 1):
            x[i] = xi
            contrib = (R[i, i] * xi + partial[i]) ** 2
            if contrib > remaining + slack:
                continue
            descend(i - 1, remaining - contrib, partial + R[:, i] * xi)
        x[i] = 0

    descend(n - 1, float(bound) + slack, np.zeros(n))
    # keep one representative per +/- pair: first nonzero coordinate > 0
    seen = {}
    for val, vec in out:
        canon = vec
        for c in vec:
            if c != 0:
                if c < 0:
                    canon = tuple(-y for y in vec)
                break
        seen[canon] = L.quad(list(canon))
    vectors = sorted(seen.items(), key=lambda kv: (kv[1], kv[0]))
    return [np.array(v, dtype=np.int64) for v, _ in vectors], True


def vectors_of_norm(L: GramLattice, t: int):
    """All x with S[x] exactly t, up to sign (t > 0), as int tuples."""
    if t < 0:
        return []
    if t == 0:
        return [tuple([0] * L.n)]
    vecs, _ = short_vectors(L, t)
    return [tuple(int(c) for c in v) for v in vecs if L.quad([int(c) for c in v]) == t]


def is_primitive(M) -> bool:
    """True iff all elementary divisors of the integer matrix are 1."""
    rows = [[int(x) for x in row] for row in M]
    k = min(len(rows), len(rows[0]))
    d = snf_diagonal(rows)
    return len(d) == k and all(e == 1 for e in d)


def find_norm2_vector(L: GramLattice, radius: int = 6):
    """Some x with S[x] = 2, searching S[x] <= radius; None if absent."""
    for i in range(L.n):
        if L.S[i][i] == 2:
            e = [0] * L.n
            e[i] = 1
            return np.array(e, dtype=np.int64)
    vecs, _ = short_vectors(L, min(radius, 2))
    for v in vecs:
        if L.quad([int(c) for c in v]) == 2:
            return v
    return None


def canonical_columns(M):
    """Canonical representative of an integer matrix modulo right GL_k(Z).

    Column Hermite form; raises RankDeficient when columns are dependent.
    """
    rows = [[int(x) for x in row] for row in M]
    k = len(rows[0])
    if minors_gcd(rows, k) == 0:
        raise RankDeficient(f"matrix has rank below {k}")
    return column_hnf(rows)


def load_gram(path_or_name: str) -> GramLattice:
    """Catalog name or a file: first line n, then n rows of n integers."""
    key = path_or_name.strip()
    if key in CATALOG:
        return validate_gram(CATALOG[key])
    with open(path_or_name) as fh:
        tokens = fh.read().split()
    if not tokens:
        raise ValueError(f"empty Gram file: {path_or_name}")
    n = int(tokens[0])
    vals = [int(t) for t in tokens[1:]]
    if len(vals) != n * n:
        raise ValueError(f"expected {n * n} entries, found {len(vals)}")
    return validate_gram([vals[i * n:(i + 1) * n] for i in range(n)])


def so_order_bruteforce(L: GramLattice, cap: int = 10 ** 7) -> int:
    """#{g in SL_n(Z) : g^t S g = S} by column-wise backtracking.

    Columns of g are constrained: column j must have S[col] = S_jj and the
    right pairwise products; candidates come from the norm shells of S.
    Practical for the small catalog lattices only.
    """
    n = L.n
    Smat = L.gram()
    shells = {}
    for j in range(n):
        t = Smat[j][j]
        if t not in shells:
            ups = vectors_of_norm(L, t)
            full = []
            for v in ups:
                full.append(v)
                if any(v):
                    full.append(tuple(-c for c in v))
            shells[t] = full
    count = 0
    nodes = 0
    cols: list = []

    def sigma(u, v) -> int:
        return sum(ui * sum(srow[k] * v[k] for k in range(n))
                   for ui, srow in zip(u, Smat))

    def place(j: int):
        nonlocal count, nodes
        if j == n:
            g = [[cols[c][r] for c in range(n)] for r in range(n)]
            if bareiss_det(g) == 1:
                count += 1
            return
        for v in shells[Smat[j][j]]:
            nodes += 1
            if nodes > cap:
                raise RankDeficient("automorphism search exceeded node cap")
            if all(sigma(cols[i], v) == Smat[i][j] for i in range(j)):
                cols.append(v)
                place(j + 1)
                cols.pop()

    place(0)
    return count
