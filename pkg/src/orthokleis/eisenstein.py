"""Primitive isotropic rank-2 classes and the truncated series in Epstein
form, with the divisor-sum bookkeeping for imprimitive classes.

Coordinates of the big space are v = (a, c, x, d, b) with x a lattice
vector; the bordered form is S1[v] = 2ab + 2cd - S[x] and the base
majorant is R[v] = a^2 + c^2 + S[x] + d^2 + b^2.  On S1-isotropic vectors
the projection psi(v) = (a+b, c+d) satisfies R[v] = |psi(v)|^2, and the
same holds for pairings inside an isotropic plane, so a rank-2 isotropic
column lattice P has det(R[ell]) = [Z^2 : psi(P)]^2 for any basis ell.
Base-point enumeration therefore walks image sublattices of Z^2 by index
D <= sqrt(B) and lifts a Lagrange-reduced basis through the psi fibers.

For a general majorant the enumeration is Fincke-Pohst: every admissible
class has a reduced basis (l, m) with R[l] <= sqrt(4B/3) and
R[m] <= (4/3) B / R[l] (the completeness-critical constants: reduced
bases satisfy R[l] R[m] <= (4/3) det(R[ell])), so short isotropic vectors
are listed first and partners are enumerated inside the S1-orthogonal
sublattice of each.  All final acceptance tests are exact or carry a
1e-9 relative boundary guard.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, ConvergenceGuard, RankDeficient
from .intmat import bareiss_det, integer_kernel, mat_mul, mat_transpose, minors_gcd
from .lattice import GramLattice, canonical_columns, vectors_of_norm
from .majorant import base_majorant, majorant_at
from .orthogroup import OrthElement, Space, TubePoint

DEFAULT_CAP = 8_000_000
REL_EPS = 1e-9


@dataclass(frozen=True)
class IsotropicClass:
    """A right-GL2(Z) class of primitive isotropic rank-2 integer matrices,
    held by its canonical (column Hermite) representative."""

    ell: tuple
    detR: float

    def matrix(self) -> np.ndarray:
        return np.array([list(r) for r in self.ell], dtype=np.int64)


def sigma1(m: int) -> int:
    """Sum of divisors."""
    return sum(d for d in range(1, m + 1) if m % d == 0)


def _divisors(m: int):
    return [d for d in range(1, m + 1) if m % d == 0]


# ------------------------------------------------------- base-point path

_norm_cache: dict = {}


def _all_of_norm(L: GramLattice, t: int):
    """All lattice vectors of S-norm exactly t, both signs, cached."""
    key = (L, t)
    hit = _norm_cache.get(key)
    if hit is None:
        half = vectors_of_norm(L, t)
        if t == 0:
            hit = half
        else:
            hit = half + [tuple(-c for c in v) for v in half]
        _norm_cache[key] = hit
    return hit


def _ball_estimate(L: GramLattice, t: float) -> float:
    """Volume estimate of #{x : S[x] <= t}; used only to guard budgets."""
    n = L.n
    vol = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0)
    return vol * max(t, 0.0) ** (n / 2.0) / math.sqrt(float(L.det)) + 1.0


def _lagrange_reduce(v1, v2):
    """Gauss-reduced basis of the plane lattice spanned by v1, v2."""

    def n2(v):
        return v[0] * v[0] + v[1] * v[1]

    if n2(v1) > n2(v2):
        v1, v2 = v2, v1
    while True:
        num = v2[0] * v1[0] + v2[1] * v1[1]
        den = n2(v1)
        mu = (2 * num + den) // (2 * den)  # round(num/den) without floats
        v2 = (v2[0] - mu * v1[0], v2[1] - mu * v1[1])
        if n2(v2) >= n2(v1):
            return v1, v2
        v1, v2 = v2, v1


def _index_sublattices(D: int):
    """Reduced bases of the index-D sublattices of Z^2 (sigma1(D) of them)."""
    out = []
    for a in _divisors(D):
        d = D // a
        for b in range(d):
            out.append(_lagrange_reduce((a, b), (0, d)))
    return out


def _fiber_estimate(space: Space, pq) -> float:
    """Volume-based size estimate of the psi fiber over pq."""
    L = space.L
    p, q = pq
    bound = p * p + q * q
    est = 0.0
    ulim = math.isqrt(bound)
    for u in range(-ulim, ulim + 1):
        if (u - p) % 2:
            continue
        wlim = math.isqrt(bound - u * u)
        for w in range(-wlim, wlim + 1):
            if (w - q) % 2:
                continue
            est += _ball_estimate(L, (bound - u * u - w * w) // 2)
    return est


def _fiber(space: Space, pq, cap: int):
    """All S1-isotropic integer vectors v with psi(v) = pq.

    Parameterized by u = a - b, w = c - d (parity fixed by pq) and lattice
    vectors of norm t = (|pq|^2 - u^2 - w^2) / 2; the construction makes
    S1[v] = 0 automatic.
    """
    L = space.L
    p, q = pq
    bound = p * p + q * q
    plan = []
    est = 0.0
    ulim = math.isqrt(bound)
    for u in range(-ulim, ulim + 1):
        if (u - p) % 2:
            continue
        wlim = math.isqrt(bound - u * u)
        for w in range(-wlim, wlim + 1):
            if (w - q) % 2:
                continue
            t = (bound - u * u - w * w) // 2
            plan.append((u, w, t))
            est += _ball_estimate(L, t)
    if est > 3.0 * cap:
        raise BudgetExceeded(
            f"estimated fiber size {est:.2e} for psi-image {pq} "
            f"exceeds the enumeration cap", int(est), cap)
    out = []
    for u, w, t in plan:
        xs = _all_of_norm(L, t)
        if len(out) + len(xs) > cap:
            raise BudgetExceeded(
                f"fiber for psi-image {pq} exceeds the enumeration cap",
                len(out) + len(xs), cap)
        a, b = (p + u) // 2, (p - u) // 2
        c, d = (q + w) // 2, (q - w) // 2
        for x in xs:
            out.append((a, c) + x + (d, b))
    return out


_base_class_cache: dict = {}


def _base_classes(space: Space, B: float, cap: int, primitive_only: bool):
    """Class dict {canonical rows: detR} at the base-point majorant."""
    limit = B * (1.0 + REL_EPS) + REL_EPS
    Dmax = math.isqrt(int(limit))
    key = (space.L, Dmax, primitive_only)
    hit = _base_class_cache.get(key)
    if hit is not None:
        return dict(hit)
    m = space.dim + 2
    S1 = np.array(space.S1_int, dtype=np.int64)
    # cheap whole-run feasibility scan before any fiber is built
    est_total = 0.0
    for D in range(1, Dmax + 1):
        for pvec, rvec in _index_sublattices(D):
            est_total += _fiber_estimate(space, pvec) * _fiber_estimate(space, rvec)
    if est_total > 3.0 * cap:
        raise BudgetExceeded(
            f"estimated candidate pair count {est_total:.2e} over image "
            f"indices up to {Dmax} exceeds the enumeration cap",
            int(est_total), cap)
    found: dict = {}
    pair_budget = 0
    for D in range(1, Dmax + 1):
        for pvec, rvec in _index_sublattices(D):
            F1 = _fiber(space, pvec, cap)
            F2 = _fiber(space, rvec, cap)
            pair_budget += len(F1) * len(F2)
            if pair_budget > cap:
                raise BudgetExceeded(
                    f"candidate pair count for image index {D} exceeds cap",
                    pair_budget, cap)
            A1 = np.array(F1, dtype=np.int64)
            A2 = np.array(F2, dtype=np.int64)
            right = S1 @ A2.T
            chunk = max(1, 4_000_000 // max(1, A2.shape[0]))
            for lo in range(0, A1.shape[0], chunk):
                block = A1[lo:lo + chunk] @ right
                for i, j in np.argwhere(block == 0):
                    v = F1[lo + i]
                    w = F2[j]
                    rows = [(v[r], w[r]) for r in range(m)]
                    if primitive_only and minors_gcd(rows, 2) != 1:
                        continue
                    canon = canonical_columns(rows)
                    ckey = tuple(tuple(r) for r in canon)
                    if ckey not in found:
                        found[ckey] = float(D * D)
    _base_class_cache[key] = dict(found)
    return found


# ---------------------------------------------------- general majorants

def _cholesky_upper(Q: np.ndarray) -> np.ndarray:
    m = Q.shape[0]
    jitter = 1e-12 * max(1.0, float(np.trace(Q)) / m)
    return np.linalg.cholesky(Q + jitter * np.eye(m)).T


def _ldl(Q: np.ndarray):
    """Unit-lower LDL^t factors (mu, d) of a positive form; d may pick up
    roundoff for near-degenerate inputs, callers guard on positivity."""
    m = Q.shape[0]
    mu = np.eye(m)
    d = np.zeros(m)
    for i in range(m):
        for j in range(i):
            mu[i, j] = (Q[i, j] - np.dot(mu[i, :j] * mu[j, :j], d[:j])) / d[j]
        d[i] = Q[i, i] - np.dot(mu[i, :i] ** 2, d[:i])
        if d[i] <= 0:
            d[i] = np.nan
            break
    return mu, d


def _lll_gram(Q: np.ndarray, delta: float = 0.75) -> np.ndarray:
    """Unimodular integer U with Q[U] LLL-reduced (refactored from
    scratch each step; the dimensions here are tiny).

    Reduction only improves enumeration geometry; correctness of the
    callers never depends on its quality, so numerical trouble simply
    returns the progress made so far.
    """
    m = Q.shape[0]
    U = np.eye(m, dtype=np.int64)
    for _ in range(10000):
        G = U.T @ Q @ U
        mu, d = _ldl(G)
        if np.isnan(d).any():
            return U
        # size-reduce in one sweep
        changed = False
        for k in range(1, m):
            for j in range(k - 1, -1, -1):
                q = round(mu[k, j])
                if q:
                    U[:, k] -= q * U[:, j]
                    mu[k, : j + 1] -= q * mu[j, : j + 1]
                    changed = True
        if changed:
            G = U.T @ Q @ U
            mu, d = _ldl(G)
            if np.isnan(d).any():
                return U
        swapped = False
        for k in range(1, m):
            if d[k] < (delta - mu[k, k - 1] ** 2) * d[k - 1]:
                U[:, [k - 1, k]] = U[:, [k, k - 1]]
                swapped = True
                break
        if not swapped:
            return U
    return U


def ellipsoid_points(Q: np.ndarray, T: float, cap: int) -> np.ndarray:
    """All nonzero integer v with Q[v] <= T (tiny boundary slack), as an
    int64 array; LLL-preconditioned layered Fincke-Pohst, budget-guarded
    per level."""
    m = Q.shape[0]
    Ured = _lll_gram(Q)
    Qred = Ured.T @ Q @ Ured
    pts = _fp_points(Qred, T, cap)
    return pts @ Ured.T


def _fp_points(Q: np.ndarray, T: float, cap: int) -> np.ndarray:
    m = Q.shape[0]
    U = _cholesky_upper(Q)
    tol = 1e-9 * max(T, 1.0)
    acc = np.zeros((1, m))
    sq = np.zeros(1)
    tails = np.zeros((1, 0), dtype=np.int64)
    for i in range(m - 1, -1, -1):
        rem = T + tol - sq
        uii = U[i, i]
        cen = -acc[:, i] / uii
        rad = np.sqrt(np.maximum(rem, 0.0)) / uii
        lo = np.ceil(cen - rad - 1e-12).astype(np.int64)
        hi = np.floor(cen + rad + 1e-12).astype(np.int64)
        counts = np.maximum(hi - lo + 1, 0)
        total = int(counts.sum())
        if total > cap:
            raise BudgetExceeded(
                f"enumeration layer {i} holds {total} candidates", total, cap)
        if total == 0:
            return np.zeros((0, m), dtype=np.int64)
        idx = np.repeat(np.arange(len(counts)), counts)
        starts = np.concatenate(([0], np.cumsum(counts)[:-1]))
        offs = np.arange(total) - np.repeat(starts, counts)
        vi = lo[idx] + offs
        acc = acc[idx] + vi[:, None] * U[:, i][None, :]
        sq = sq[idx] + acc[:, i] ** 2
        keep = sq <= T + tol
        tails = np.hstack([vi[keep][:, None], tails[idx][keep]])
        acc = acc[keep]
        sq = sq[keep]
    nz = np.any(tails != 0, axis=1)
    return tails[nz]


def _isotropy_mask(space: Space, V: np.ndarray) -> np.ndarray:
    S1 = np.array(space.S1_int, dtype=np.int64)
    return np.einsum("ij,jk,ik->i", V, S1, V) == 0


def _general_classes(space: Space, R: np.ndarray, B: float, cap: int,
                     primitive_only: bool):
    m = space.dim + 2
    limit = B * (1.0 + REL_EPS) + REL_EPS
    B1 = math.sqrt(4.0 * B / 3.0) * (1.0 + REL_EPS)
    stage1 = ellipsoid_points(R, B1, cap)
    if stage1.shape[0] == 0:
        return {}
    iso = stage1[_isotropy_mask(space, stage1)]
    # one sign per line: first nonzero coordinate positive
    reps = []
    for v in iso:
        v = tuple(int(c) for c in v)
        lead = next(c for c in v if c != 0)
        if lead > 0:
            reps.append(v)
    reps.sort()
    S1_rows = space.S1_int
    found: dict = {}
    spent = 0
    for l in reps:
        Rl = float(np.array(l) @ R @ np.array(l))
        B2 = (4.0 / 3.0) * B / max(Rl, 1e-300) * (1.0 + REL_EPS)
        row = [[sum(S1_rows[i][j] * l[i] for i in range(m)) for j in range(m)]]
        kern = integer_kernel(row)
        W = np.array(kern, dtype=np.int64).T  # columns span the kernel
        Qk = W.T @ R @ W
        ys = ellipsoid_points(Qk, B2, cap - spent)
        spent += ys.shape[0]
        if spent > cap:
            raise BudgetExceeded("partner enumeration exceeded cap", spent, cap)
        if ys.shape[0] == 0:
            continue
        cands = ys @ W.T
        cands = cands[_isotropy_mask(space, cands)]
        lv = np.array(l, dtype=np.int64)
        Rlv = R @ lv
        for v in cands:
            rows = [(int(l[r]), int(v[r])) for r in range(m)]
            g2 = minors_gcd(rows, 2)
            if g2 == 0:
                continue  # parallel to l
            if primitive_only and g2 != 1:
                continue
            Rvv = float(v @ R @ v)
            Rlm = float(v @ Rlv)
            det2 = Rl * Rvv - Rlm * Rlm
            if det2 > limit:
                continue
            canon = canonical_columns(rows)
            ckey = tuple(tuple(r) for r in canon)
            if ckey not in found:
                found[ckey] = det2
    return found


# ------------------------------------------------------------ public API

def enumerate_isotropic_classes(space: Space, R: np.ndarray, B: float,
                                cap: int = DEFAULT_CAP,
                                primitive_only: bool = True,
                                _force_general: bool = False):
    """All classes [ell] with det(R[ell]) <= B (1e-9 relative slack at the
    boundary), S1[ell] = 0, rank 2, primitive unless told otherwise."""
    if not B > 0:
        raise ValueError("B must be positive")
    if not _force_general and np.allclose(R, base_majorant(space),
                                          rtol=0.0, atol=1e-12):
        found = _base_classes(space, B, cap, primitive_only)
    else:
        found = _general_classes(space, R, B, cap, primitive_only)
    out = [IsotropicClass(ell=k, detR=v) for k, v in found.items()]
    out.sort(key=lambda c: (c.detR, c.ell))
    return out


def canonical_class(ell) -> list:
    """Canonical representative of the right-GL2(Z) class of ell."""
    return canonical_columns(ell)


def class_value(classes, s: complex) -> complex:
    """Sum of det(R[ell])^(-s/2) over the given classes."""
    s = complex(s)
    total = 0j
    for c in classes:
        total += c.detR ** (-s / 2)
    return total


def transport_classes(space: Space, classes, g: OrthElement,
                      R_new: np.ndarray):
    """Map a class list through an exact group element: ell -> g ell,
    recomputing each determinant in the majorant R_new.  Classes at a
    point Z biject this way with classes at g<Z>."""
    if not g.exact:
        raise ValueError("transport requires an exact integral element")
    m = space.dim + 2
    gmat = [[int(x) for x in row] for row in g.mat]
    out = []
    for c in classes:
        moved = mat_mul(gmat, [list(r) for r in c.ell])
        canon = canonical_columns(moved)
        arr = np.array(canon, dtype=float)
        gram = arr.T @ R_new @ arr
        det2 = float(gram[0, 0] * gram[1, 1] - gram[0, 1] * gram[1, 0])
        out.append(IsotropicClass(ell=tuple(tuple(r) for r in canon), detR=det2))
    out.sort(key=lambda c: (c.detR, c.ell))
    return out


def eisenstein_truncated(space: Space, Z: TubePoint, s: complex, B: float,
                         allow_formal: bool = False,
                         cap: int = DEFAULT_CAP) -> complex:
    """Truncated series value at Z: the sum of det(R_Z[ell])^(-s/2) over
    all classes with det(R_Z[ell]) <= B."""
    s = complex(s)
    if s.real <= space.n + 1 and not allow_formal:
        raise ConvergenceGuard(
            f"Re(s) = {s.real} is not above the convergence line {space.n + 1}")
    if not B > 0:
        raise ValueError("B must be positive")
    R = majorant_at(space, Z)
    classes = enumerate_isotropic_classes(space, R, B, cap=cap)
    return class_value(classes, s)


def eisenstein_report(space: Space, Z: TubePoint, s: complex, B: float,
                      allow_formal: bool = False,
                      cap: int = DEFAULT_CAP) -> dict:
    """Evaluation plus bookkeeping, in the shape the CLI serializes."""
    s = complex(s)
    formal = s.real <= space.n + 1
    if formal and not allow_formal:
        raise ConvergenceGuard(
            f"Re(s) = {s.real} is not above the convergence line {space.n + 1}")
    R = majorant_at(space, Z)
    classes = enumerate_isotropic_classes(space, R, B, cap=cap)
    value = class_value(classes, s)
    rep = {
        "classes": len(classes),
        "B": float(B),
        "s": [s.real, s.imag],
        "value": [value.real, value.imag],
        "exhaustive": True,
    }
    if formal:
        rep["label"] = "formal truncation"
    return rep


def hnf_det_class_count(m: int) -> int:
    """Number of right-GL2(Z) classes of integer 2x2 matrices with
    |det| = m, counted by enumerating Hermite forms; equals sigma1(m)."""
    if m < 1:
        raise ValueError("m must be a positive integer")
    return len(hnf_class_reps(m))


def hnf_class_reps(m: int):
    """The column-Hermite representatives: matrices [[a, 0], [c, d]] with
    a d = m and 0 <= c < d, one per column lattice of index m."""
    reps = []
    for a in _divisors(m):
        d = m // a
        for c in range(d):
            reps.append(((a, 0), (c, d)))
    return reps


def imprimitive_factorization_check(ell):
    """Split ell = N * M with N the canonical primitive saturation basis
    and M an integer 2x2 matrix of nonzero determinant."""
    rows = [[int(x) for x in row] for row in ell]
    m = len(rows)
    if minors_gcd(rows, 2) == 0:
        raise RankDeficient("matrix does not have rank 2")
    ortho = integer_kernel(mat_transpose(rows))  # vectors x with ell^t x = 0
    if ortho:
        # each orthogonal vector is one linear constraint on the saturation
        sat_cols = integer_kernel([list(x) for x in ortho])
    else:
        sat_cols = [[int(i == j) for i in range(m)] for j in range(2)]
    N0 = mat_transpose(sat_cols)  # m x 2
    N = canonical_columns(N0)
    piv = None
    for i in range(m):
        for j in range(i + 1, m):
            det2 = N[i][0] * N[j][1] - N[i][1] * N[j][0]
            if det2 != 0:
                piv = (i, j, det2)
                break
        if piv:
            break
    i, j, det2 = piv
    inv = [[Fraction(N[j][1], det2), Fraction(-N[i][1], det2)],
           [Fraction(-N[j][0], det2), Fraction(N[i][0], det2)]]
    target = [rows[i], rows[j]]
    Mfrac = mat_mul(inv, target)
    M = []
    for row in Mfrac:
        out_row = []
        for x in row:
            f = Fraction(x)
            if f.denominator != 1:
                raise RankDeficient(f"saturation solve produced {f}")
            out_row.append(f.numerator)
        M.append(out_row)
    if mat_mul(N, M) != rows:
        raise RankDeficient("recomposition failed")
    if bareiss_det(M) == 0:
        raise RankDeficient("cofactor determinant vanished")
    return N, M
