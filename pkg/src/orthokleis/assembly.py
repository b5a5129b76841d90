"""Completed-series machinery: zeta and xi with reflection, the paired
gamma factors, a positive-cone matrix integral cross-check, and the
assembly of completion-factor products with their reflection maps.

Numeric policy: values are returned as machine complex numbers.  The
environment variable ORTHOKLEIS_PRECISION (decimal digits, default 16)
sets the working precision; above 16 digits the zeta core switches to
mpmath arithmetic internally while keeping the same summation scheme.
"""

from __future__ import annotations

import cmath
import csv
import json
import math
import os
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from scipy import integrate
from scipy.special import gamma as _gamma_c

from .eisenstein import eisenstein_truncated
from .errors import ConvergenceGuard, PoleAt, QuadratureBudget
from .orthogroup import Space

_POLE_TOL = 1e-12


def working_precision() -> int:
    """Decimal digits requested through the environment, default 16."""
    raw = os.environ.get("ORTHOKLEIS_PRECISION", "16")
    try:
        digits = int(raw)
    except ValueError:
        raise ValueError(
            f"ORTHOKLEIS_PRECISION must be an integer, got {raw!r}")
    if digits < 6:
        raise ValueError("working precision below 6 digits is not supported")
    return digits


@lru_cache(maxsize=None)
def bernoulli_number(n: int) -> Fraction:
    """Exact Bernoulli number by the defining recurrence."""
    if n == 0:
        return Fraction(1)
    if n == 1:
        return Fraction(-1, 2)
    if n % 2:
        return Fraction(0)
    total = Fraction(0)
    for k in range(n):
        total += Fraction(math.comb(n + 1, k)) * bernoulli_number(k)
    return -total / (n + 1)


def _em_parameters(s: complex, digits: int) -> tuple[int, int]:
    t = abs(s.imag)
    N = max(24, int(1.4 * digits) + int(0.7 * t) + 8)
    M = max(10, digits // 2 + 6)
    return N, M


def _zeta_sum_float(s: complex, digits: int) -> complex:
    N, M = _em_parameters(s, digits)
    total = sum((j ** -s for j in range(1, N)), 0j)
    total += N ** (1 - s) / (s - 1) + 0.5 * N ** -s
    rise = s
    npow = N ** (-s - 1)
    for m in range(1, M + 1):
        total += float(
            bernoulli_number(2 * m) / math.factorial(2 * m)) * rise * npow
        rise *= (s + 2 * m - 1) * (s + 2 * m)
        npow /= N * N
    return total

def _zeta_sum_mp(s: complex, digits: int) -> complex:
    # identical scheme, arbitrary-precision arithmetic
    N, M = _em_parameters(s, digits)
    with mpmath.workdps(digits + 8):
        sm = mpmath.mpc(s)
        total = mpmath.fsum(mpmath.power(j, -sm) for j in range(1, N))
        total += mpmath.power(N, 1 - sm) / (sm - 1)
        total += mpmath.power(N, -sm) / 2
        rise = sm
        npow = mpmath.power(N, -sm - 1)
        for m in range(1, M + 1):
            b = bernoulli_number(2 * m) / math.factorial(2 * m)
            total += mpmath.mpf(b.numerator) / b.denominator * rise * npow
            rise *= (sm + 2 * m - 1) * (sm + 2 * m)
            npow /= N * N
        return complex(total)


def zeta(s, digits: int | None = None) -> complex:
    """Riemann zeta by Euler-Maclaurin summation, reflected into the left
    half-plane; accurate to well below 1e-10 for |Im s| <= 50."""
    s = complex(s)
    if abs(s - 1) < _POLE_TOL:
        raise PoleAt(1, residue=1, label="zeta")
    if digits is None:
        digits = working_precision()
    core = _zeta_sum_mp if digits > 16 else _zeta_sum_float
    # the summation scheme converges on |s| <= 1/2 as well, which keeps
    # the reflection factor sin(pi s/2) * zeta(1-s) away from its 0 * inf
    # collision at the origin
    if s.real >= 0.5 or abs(s) <= 0.5:
        return core(s, digits)
    w = 1 - s
    return (2 ** s * math.pi ** (s - 1) * cmath.sin(cmath.pi * s / 2)
            * _gamma(w, digits) * core(w, digits))


def _gamma(s: complex, digits: int = 16) -> complex:
    if digits > 16:
        with mpmath.workdps(digits + 8):
            return complex(mpmath.gamma(mpmath.mpc(s)))
    return complex(_gamma_c(s))


def xi(s, digits: int | None = None) -> complex:
    """The completed zeta pi^{-s/2} Gamma(s/2) zeta(s), self-dual under
    s -> 1-s, with simple poles at 0 and 1."""
    s = complex(s)
    if abs(s) < _POLE_TOL:
        raise PoleAt(0, residue=-1, label="xi")
    if abs(s - 1) < _POLE_TOL:
        raise PoleAt(1, residue=1, label="xi")
    if digits is None:
        digits = working_precision()
    half = s / 2
    # the gamma factor has poles at nonpositive even s that cancel the
    # trivial zeros; route through the reflection in a small window so
    # the cancellation never happens in floating point
    if s.real < 0.5:
        near = round(s.real / 2) * 2
        if near <= 0 and abs(s - near) < 1e-8:
            return xi(1 - s, digits)
    return math.pi ** (-s / 2) * _gamma(half, digits) * zeta(s, digits)


# ------------------------------------------------------- gamma companions

def gamma2(s, digits: int | None = None) -> complex:
    """Gamma(s) Gamma(s - 1/2)."""
    s = complex(s)
    digits = working_precision() if digits is None else digits
    return _gamma(s, digits) * _gamma(s - 0.5, digits)


def phi2_value(t):
    """t(t - 1/2): exact for rational input, complex otherwise."""
    if isinstance(t, (int, Fraction)):
        t = Fraction(t)
        return t * (t - Fraction(1, 2))
    t = complex(t)
    return t * (t - 0.5)


def gamma_s_offsets(n: int) -> list[Fraction]:
    """Arguments of the quadratic factors, as offsets c in phi2(s/2 + c)."""
    if n % 4 != 0:
        raise ValueError("the factor product needs 4 | n")
    r = n // 4
    offs = [Fraction(-2 * r), Fraction(0)]
    offs += [Fraction(3, 2) - 2 * j for j in range(1, r + 1)]
    return offs


def gamma_s(s, n: int):
    """(-4)^r prod phi2(s/2 + c) over the offset list; exact at rational s."""
    offs = gamma_s_offsets(n)
    r = n // 4
    if isinstance(s, (int, Fraction)):
        out = Fraction(-4) ** r
        for c in offs:
            out *= phi2_value(Fraction(s) / 2 + c)
        return out
    s = complex(s)
    out = complex((-4) ** r)
    for c in offs:
        out *= phi2_value(s / 2 + float(c))
    return out


def gamma_s_roots(n: int) -> list[Fraction]:
    """Zeros of the factor product in s, with multiplicity, sorted."""
    roots = []
    for c in gamma_s_offsets(n):
        roots += [-2 * c, 1 - 2 * c]
    return sorted(roots)


def gamma_factors(s, n: int):
    """(Gamma_2(s), phi2(s), product factor) as one bundle."""
    return gamma2(s), phi2_value(s), gamma_s(s, n)


# ---------------------------------------------- positive-cone integral

def p2_integral_check(s, T, rel_tol: float = 1e-4) -> tuple[complex, complex]:
    """Adaptive cubature of the determinant-power Gaussian against its
    closed form sqrt(pi) Gamma_2(s) det(T)^{-s}.

    The invariant measure (det Y)^{-3/2} dY is charted as
    (y1, y2, u = y3/sqrt(y1 y2)) which turns the cone into a box times
    two half-lines and concentrates the boundary weight into the factor
    (1 - u^2)^{s - 3/2}.
    """
    s = complex(s)
    if s.real <= 0.5:
        raise ValueError("the integral requires Re(s) > 1/2")
    T = np.asarray(T, dtype=float)
    if T.shape != (2, 2) or abs(T[0, 1] - T[1, 0]) > 1e-12:
        raise ValueError("T must be a symmetric 2x2 matrix")
    ev = np.linalg.eigvalsh(T)
    if ev[0] <= 0:
        raise ValueError("T must be positive definite")
    t1, t2, t3 = T[0, 0], T[1, 1], T[0, 1]
    det_t = t1 * t2 - t3 * t3
    closed = math.sqrt(math.pi) * gamma2(s) * det_t ** (-s)

    def make_integrand(part):
        def f(u, y1, y2):
            g = math.sqrt(y1 * y2)
            val = ((y1 * y2) ** (s - 1) * (1 - u * u) ** (s - 1.5)
                   * math.exp(-(t1 * y1 + t2 * y2 + 2 * t3 * u * g)))
            return val.real if part == 0 else val.imag
        return f

    ranges = [(-1.0, 1.0), (0.0, np.inf), (0.0, np.inf)]
    # quadpack certificates stop improving much below 1e-10 while the cost
    # keeps climbing, so clamp what we ask of it; the budget comparison
    # below still holds the caller's rel_tol.
    opts = {"epsrel": max(rel_tol / 20, 1e-10), "epsabs": 0.0, "limit": 60}
    parts = []
    err_total = 0.0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        for part in (0, 1) if s.imag != 0 else (0,):
            val, err = integrate.nquad(make_integrand(part), ranges, opts=opts)
            parts.append(val)
            err_total += err
    numeric = complex(parts[0], parts[1] if len(parts) > 1 else 0.0)
    if err_total > rel_tol * max(abs(closed), 1e-300):
        raise QuadratureBudget(
            f"cubature error estimate {err_total:.2e} exceeds the requested "
            f"relative tolerance {rel_tol:g} of |closed| = {abs(closed):.3e}")
    return numeric, closed


# --------------------------------------------------- completed assemblies

@dataclass(frozen=True)
class CompletedSeriesFactors:
    """A completed value split into its labeled completion factors."""

    s: complex
    n: int
    r: int
    factors: tuple
    series_value: complex
    completed_value: complex
    k: int | None = None
    integral_prefactor: complex | None = None

    def __post_init__(self):
        if self.n % 4 != 0 or self.r != self.n // 4:
            raise ValueError("rank must be divisible by 4 with r = n/4")
        for _, value in self.factors:
            if value is None or not np.isfinite(complex(value)):
                raise ValueError("completion factors must be finite")

    def factor_product(self) -> complex:
        out = 1 + 0j
        for _, value in self.factors:
            out *= complex(value)
        return out

    def as_dict(self) -> dict:
        return {
            "s": [self.s.real, self.s.imag],
            "n": self.n,
            "r": self.r,
            "k": self.k,
            "factors": [
                {"label": lab, "value": [complex(v).real, complex(v).imag]}
                for lab, v in self.factors
            ],
            "series_value": [self.series_value.real, self.series_value.imag],
            "completed_value": [
                self.completed_value.real, self.completed_value.imag],
            "integral_prefactor": (
                None if self.integral_prefactor is None else
                [self.integral_prefactor.real, self.integral_prefactor.imag]),
        }


def eisenstein_reflection(s):
    """The functional-equation substitution for the rank-8 series."""
    return 9 - s


def dirichlet_reflection(s, k):
    return 2 * k - 9 - s


def completed_e8_eisenstein(space: Space, W, s, B: float,
                            cap: int | None = None) -> CompletedSeriesFactors:
    """Truncated rank-8 series multiplied by its completion factors
    xi(s-3) xi(2s-8) xi(s) xi(s-1) and the quadratic factor product."""
    if space.n != 8:
        raise ValueError("this assembly is specific to rank 8")
    s = complex(s)
    factors = (
        ("xi(s-3)", xi(s - 3)),
        ("xi(2s-8)", xi(2 * s - 8)),
        ("xi(s)", xi(s)),
        ("xi(s-1)", xi(s - 1)),
        ("gamma_S(s)", gamma_s(s, 8)),
    )
    kwargs = {} if cap is None else {"cap": cap}
    series = eisenstein_truncated(space, W, s, B, **kwargs)
    out = CompletedSeriesFactors(
        s=s, n=8, r=2, factors=factors, series_value=series,
        completed_value=series * math.prod(
            (complex(v) for _, v in factors), start=1 + 0j))
    return out


def completed_dirichlet(coeffs, s, k: int, n: int,
                        so_order: int) -> CompletedSeriesFactors:
    """Finite coefficient sum m^{-s} with the completion factor product
    (4 pi)^{-s} Gamma(s) xi(s-k+6) xi(2s-2k+10) xi(s-k+9) xi(s-k+8) and
    the quadratic factor at s-k+9; also exposes the normalization
    prefactor (4 pi)^{-(s+k-n-1)} Gamma(s+k-n-1) / so_order."""
    if n % 4 != 0:
        raise ValueError("rank must be divisible by 4")
    if not isinstance(so_order, int) or so_order <= 0:
        raise ValueError("the finite group order must be a positive integer")
    s = complex(s)
    if s.real <= k + 1:
        raise ConvergenceGuard(
            f"Re(s) = {s.real} is not above the convergence line {k + 1}")
    series = sum(
        (complex(c) * (m + 1) ** -s for m, c in enumerate(coeffs)), 0j)
    factors = (
        ("(4pi)^(-s)Gamma(s)", (4 * math.pi) ** -s * _gamma(s)),
        ("xi(s-k+6)", xi(s - k + 6)),
        ("xi(2s-2k+10)", xi(2 * s - 2 * k + 10)),
        ("xi(s-k+9)", xi(s - k + 9)),
        ("xi(s-k+8)", xi(s - k + 8)),
        ("gamma_S(s-k+9)", gamma_s(s - k + 9, n)),
    )
    w = s + k - n - 1
    prefactor = (4 * math.pi) ** -w * _gamma(w) / so_order
    product = math.prod((complex(v) for _, v in factors), start=1 + 0j)
    return CompletedSeriesFactors(
        s=s, n=n, r=n // 4, k=k, factors=factors, series_value=series,
        completed_value=product * series, integral_prefactor=prefactor)


def reflection_consistency(k) -> dict:
    """Exact affine algebra tying the two reflections together: shifting
    by s -> s - k + 9 conjugates s -> 2k-9-s into s -> 9-s."""
    k = Fraction(k)

    def compose(outer, inner):
        # affine maps as (slope, intercept)
        return (outer[0] * inner[0], outer[0] * inner[1] + outer[1])

    shift = (Fraction(1), 9 - k)
    dirichlet = (Fraction(-1), 2 * k - 9)
    eisenstein = (Fraction(-1), Fraction(9))
    lhs = compose(shift, dirichlet)
    rhs = compose(eisenstein, shift)
    return {"lhs": lhs, "rhs": rhs, "consistent": lhs == rhs}


def modified_siegel_factors(s) -> dict:
    """The factor pair {xi(2s), xi(4s-2)} for the degenerate rank-2
    series, with pole bookkeeping and the reflected arguments under
    s -> 3/2 - s."""
    s = complex(s)
    out = {
        "args": [2 * s, 4 * s - 2],
        "reflected_args": [3 - 2 * s, 4 - 4 * s],
        "series_pole": abs(s - 1.5) < 1e-9,
        "factors": [],
        "poles": [],
    }
    for lab, u in (("xi(2s)", 2 * s), ("xi(4s-2)", 4 * s - 2)):
        try:
            out["factors"].append((lab, xi(u)))
        except PoleAt as exc:
            out["factors"].append((lab, None))
            out["poles"].append((lab, exc.location))
    return out


# ------------------------------------------------------- coefficient I/O

def read_coefficient_file(path) -> list[complex]:
    """Coefficient sequences from JSON (array of numbers or [re, im]
    pairs) or CSV rows index,value-re,value-im with 1-based indices."""
    text = open(path, "r", encoding="utf-8").read()
    name = str(path).lower()
    if name.endswith(".json"):
        data = json.loads(text)
        out = []
        for item in data:
            if isinstance(item, (list, tuple)):
                out.append(complex(float(item[0]), float(item[1])))
            else:
                out.append(complex(item))
        return out
    rows = list(csv.reader(text.strip().splitlines()))
    if rows and not rows[0][0].strip().lstrip("-").isdigit():
        rows = rows[1:]  # header
    entries = {}
    for row in rows:
        if not row or not row[0].strip():
            continue
        idx = int(row[0])
        if idx < 1:
            raise ValueError("coefficient indices are 1-based")
        re = float(row[1])
        im = float(row[2]) if len(row) > 2 and row[2].strip() else 0.0
        entries[idx] = complex(re, im)
    if not entries:
        return []
    out = [0j] * max(entries)
    for idx, val in entries.items():
        out[idx - 1] = val
    return out
